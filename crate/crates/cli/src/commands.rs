use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use permuton_core::analysis::{
    certify_avoidance, cut_distance_bruteforce, density_monte_carlo, rect_distance_interval, sw_generate, SwMode,
    Witness,
};
use permuton_core::models::{
    build_zigzag, difference_quotients, fiber_lp_profile, is_involution_at_depth, lp_distance, prefix_pattern_count,
    sample_permutation, Atom, Direction, Fiber, Permuton, TrackPermuton,
};
use permuton_core::perm::{
    avoids, binomial, count_occurrences, format_pattern, format_permutation, parse_pattern, parse_permutation,
};
use permuton_core::rational::{format_rational, parse_decimal_or_rational, parse_rational, q};
use permuton_core::removal::{removal_experiment, resnap, rows_to_csv, ResnapOptions, TieRule, XMode};
use permuton_core::{Error, Permutation, Result};
use serde::Serialize;

use crate::args::*;

/// What a command prints and the exit code it asks for.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }

    fn negative_if(failed: bool, stdout: String) -> Self {
        Outcome {
            stdout,
            code: i32::from(failed),
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::InvalidParameter(format!("stdin: {e}")))?;
    } else {
        s = fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn read_perm(path: &Path) -> Result<Permutation> {
    parse_permutation(&read_text(path)?)
}

fn read_model(path: &Path) -> Result<Permuton> {
    Permuton::from_json(&read_text(path)?)
}

fn read_tracks(path: &Path) -> Result<TrackPermuton> {
    match read_model(path)? {
        Permuton::Tracks(t) => Ok(t),
        other => Err(Error::Unsupported(format!(
            "expected a tracks model, got {}",
            other.kind()
        ))),
    }
}

fn model_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stdin".into())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialise");
    s.push('\n');
    s
}

fn check_order(pattern: &Permutation, perm: &Permutation) -> Result<()> {
    if pattern.order() > perm.order() {
        return Err(Error::PatternTooLong {
            pattern: pattern.order(),
            perm: perm.order(),
        });
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let (fmt, seed) = (cli.format, cli.seed);
    match &cli.command {
        Command::Count(a) => count(a, fmt),
        Command::Avoid(a) => avoid(a, fmt),
        Command::Density(a) => density(a, fmt, seed),
        Command::Certify(a) => certify(a, fmt),
        Command::Removal(a) => removal(a, fmt, seed),
        Command::Sample(a) => sample(a, fmt, seed),
        Command::Distance(a) => distance(a, fmt, seed),
        Command::Lp(a) => lp(a, fmt),
        Command::Swbound(a) => swbound(a, fmt, seed),
        Command::DigitswapCheck(a) => digitswap(a, fmt),
        Command::Molecules(a) => molecules(a, fmt),
        Command::Marginals(a) => marginals(a, fmt),
        Command::Zigzag(a) => zigzag(a),
    }
}

#[derive(Serialize)]
struct CountOut {
    pattern: String,
    occurrences: String,
    total_subsets: String,
    density: String,
}

fn count_out(a: &PatternPerm) -> Result<CountOut> {
    let pattern = parse_pattern(&a.pattern)?;
    let perm = read_perm(&a.perm)?;
    check_order(&pattern, &perm)?;
    let c = count_occurrences(&pattern, &perm)?;
    Ok(CountOut {
        pattern: format_pattern(&pattern),
        occurrences: c.occurrences.to_string(),
        total_subsets: c.total_subsets.to_string(),
        density: c.density_string(),
    })
}

fn count(a: &PatternPerm, fmt: Format) -> Result<Outcome> {
    let c = count_out(a)?;
    Ok(Outcome::ok(match fmt {
        Format::Json => json(&c),
        Format::Csv => format!(
            "pattern,occurrences,total_subsets,density\n{},{},{},{}\n",
            c.pattern, c.occurrences, c.total_subsets, c.density
        ),
        Format::Text => format!("{} of {} subsets\n", c.occurrences, c.total_subsets),
    }))
}

fn avoid(a: &PatternPerm, fmt: Format) -> Result<Outcome> {
    let pattern = parse_pattern(&a.pattern)?;
    let perm = read_perm(&a.perm)?;
    check_order(&pattern, &perm)?;
    let ok = avoids(&pattern, &perm)?;
    let word = if ok { "avoids" } else { "contains" };
    let text = match fmt {
        Format::Json => json(&serde_json::json!({
            "pattern": format_pattern(&pattern),
            "avoids": ok,
        })),
        Format::Csv => format!("pattern,avoids\n{},{ok}\n", format_pattern(&pattern)),
        Format::Text => format!("{word}\n"),
    };
    Ok(Outcome::negative_if(!ok, text))
}

fn density(a: &DensityArgs, fmt: Format, seed: u64) -> Result<Outcome> {
    if let Some(path) = &a.perm {
        let c = count_out(&PatternPerm {
            pattern: a.pattern.clone(),
            perm: path.clone(),
        })?;
        return Ok(Outcome::ok(match fmt {
            Format::Json => json(&c),
            Format::Csv => format!(
                "model,pattern,value,ci,seed\n{},{},{},0,{seed}\n",
                model_id(path),
                c.pattern,
                c.density
            ),
            Format::Text => format!("{}\n", c.density),
        }));
    }
    let path = a.model.as_ref().expect("clap requires perm or model");
    let pattern = parse_pattern(&a.pattern)?;
    let model = read_model(path)?;
    let e = density_monte_carlo(&pattern, &model, a.samples, seed)?;
    Ok(Outcome::ok(match fmt {
        Format::Csv => format!(
            "model,pattern,value,ci,seed\n{},{},{},{},{}\n",
            model_id(path),
            format_pattern(&pattern),
            e.estimate,
            e.ci_half_width,
            e.seed
        ),
        Format::Json | Format::Text => json(&e),
    }))
}

fn certify(a: &CertifyArgs, fmt: Format) -> Result<Outcome> {
    let pattern = parse_pattern(&a.pattern)?;
    let model = read_tracks(&a.model)?;
    let mut cert = certify_avoidance(&pattern, &model)?;
    cert.model = model_id(&a.model);
    let text = match fmt {
        Format::Json => json(&cert),
        Format::Csv => format!(
            "pattern,model,certified,assignments,feasible\n{},{},{},{},{}\n",
            format_pattern(&pattern),
            cert.model,
            cert.certified,
            cert.assignments.len(),
            cert.assignments
                .iter()
                .filter(|x| matches!(x.verdict, permuton_core::analysis::Verdict::Feasible { .. }))
                .count()
        ),
        Format::Text => cert.report(),
    };
    Ok(Outcome::negative_if(!cert.certified, text))
}

fn removal(a: &RemovalArgs, fmt: Format, seed: u64) -> Result<Outcome> {
    let pattern = parse_pattern(&a.pattern)?;
    let model = read_model(&a.model)?;
    if let Some(path) = &a.perm {
        let tracks = model
            .as_tracks()
            .ok_or_else(|| Error::Unsupported(format!("cannot certify a {} model", model.kind())))?;
        if !certify_avoidance(&pattern, &tracks)?.certified {
            return Err(Error::NotCertified(format_pattern(&pattern)));
        }
        let perm = read_perm(path)?;
        let options = ResnapOptions {
            x_mode: match a.x_mode {
                XModeArg::Midpoint => XMode::Midpoint,
                XModeArg::Random => XMode::Random { seed },
            },
            tie_rule: match a.tie {
                TieArg::Lower => TieRule::Lower,
                TieArg::Upper => TieRule::Upper,
            },
            pattern: Some(pattern),
        };
        let r = resnap(&perm, &model, &options)?;
        let verified = r.avoidance_verified.map_or_else(|| "na".to_string(), |b| b.to_string());
        let text = match fmt {
            Format::Json => json(&r),
            Format::Csv => format!(
                "input,output,cost,normalized_cost,avoidance_verified\n{},{},{},{},{verified}\n",
                format_permutation(&r.input),
                format_permutation(&r.output),
                r.cost,
                r.normalized_cost
            ),
            Format::Text => format!(
                "output: {}\ncost: {}\nnormalized_cost: {}\navoidance_verified: {verified}\ntie_events: {}\ncollisions: {}\nmax_snap_distance: {}\n",
                format_permutation(&r.output),
                r.cost,
                r.normalized_cost,
                r.tie_events,
                r.collisions,
                format_rational(&r.max_snap_distance)
            ),
        };
        return Ok(Outcome::negative_if(r.avoidance_verified == Some(false), text));
    }
    let rhos = a
        .rho
        .iter()
        .map(|r| parse_decimal_or_rational(r))
        .collect::<Result<Vec<_>>>()?;
    let seeds: Vec<u64> = (0..a.seeds).map(|i| seed.wrapping_add(i)).collect();
    let rows = removal_experiment(&pattern, &model, &a.n, &rhos, &seeds)?;
    let text = match fmt {
        Format::Json => json(&rows),
        Format::Csv | Format::Text => rows_to_csv(&rows),
    };
    let failed = rows.iter().any(|r| r.avoidance_verified == Some(false));
    if let Some(out) = &a.out {
        fs::write(out, &text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", out.display())))?;
        return Ok(Outcome::negative_if(failed, String::new()));
    }
    Ok(Outcome::negative_if(failed, text))
}

fn sample(a: &SampleArgs, fmt: Format, seed: u64) -> Result<Outcome> {
    let model = read_model(&a.model)?;
    let perm = sample_permutation(&model, a.n, seed)?;
    Ok(Outcome::ok(match fmt {
        Format::Json => json(&perm),
        Format::Csv => format!("perm\n{}\n", format_permutation(&perm)),
        Format::Text => format!("{}\n", format_permutation(&perm)),
    }))
}

fn witness_text(w: &Witness) -> String {
    let iv = |i: &permuton_core::analysis::Interval| format!("[{};{}]", format_rational(&i.lo), format_rational(&i.hi));
    match w {
        Witness::Intervals { s, t } => format!("{}x{}", iv(s), iv(t)),
        Witness::CellUnions { s, t } => {
            let join = |v: &[permuton_core::analysis::Interval]| v.iter().map(iv).collect::<Vec<_>>().join("+");
            format!("{}x{}", join(s), join(t))
        }
    }
}

fn distance(a: &DistanceArgs, fmt: Format, seed: u64) -> Result<Outcome> {
    let (ma, mb) = (read_model(&a.a)?, read_model(&a.b)?);
    let r = match a.method {
        DistanceMethod::Interval => rect_distance_interval(&ma, &mb)?,
        DistanceMethod::Cut => match (&ma, &mb) {
            (Permuton::Step(x), Permuton::Step(y)) => cut_distance_bruteforce(x, y)?,
            _ => {
                return Err(Error::Unsupported(
                    "the brute-force distance needs two step models".into(),
                ))
            }
        },
    };
    Ok(Outcome::ok(match fmt {
        Format::Json => json(&r),
        Format::Csv => format!(
            "model_a,model_b,value,witness,seed\n{},{},{},{},{seed}\n",
            model_id(&a.a),
            model_id(&a.b),
            format_rational(&r.value),
            witness_text(&r.witness)
        ),
        Format::Text => format!("{}\nwitness {}\n", format_rational(&r.value), witness_text(&r.witness)),
    }))
}

fn parse_fiber(text: &str) -> Result<Fiber> {
    let atoms = text
        .split(',')
        .map(|pair| {
            let (y, w) = pair
                .split_once(':')
                .ok_or_else(|| Error::InvalidToken(pair.to_string()))?;
            Ok(Atom {
                y: parse_rational(y.trim())?,
                weight: parse_rational(w.trim())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Fiber::new(atoms)
}

fn lp(a: &LpArgs, fmt: Format) -> Result<Outcome> {
    if let (Some(alpha), Some(beta)) = (&a.alpha, &a.beta) {
        let d = lp_distance(&parse_fiber(alpha)?, &parse_fiber(beta)?)?;
        return Ok(Outcome::ok(match fmt {
            Format::Json => json(&serde_json::json!({ "distance": format_rational(&d) })),
            Format::Csv => format!("distance\n{}\n", format_rational(&d)),
            Format::Text => format!("{}\n", format_rational(&d)),
        }));
    }
    let path = a.model.as_ref().expect("clap requires a model");
    let model = read_tracks(path)?;
    let delta = parse_rational(&a.delta)?;
    let p = fiber_lp_profile(&model, a.grid, &delta)?;
    Ok(Outcome::ok(match fmt {
        Format::Json => json(&p),
        Format::Csv => {
            let mut s = String::from("i,j,distance\n");
            for (i, row) in p.matrix.iter().enumerate() {
                for (j, d) in row.iter().enumerate() {
                    let _ = writeln!(s, "{},{},{d}", i + 1, j + 1);
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for row in &p.matrix {
                let _ = writeln!(s, "{}", row.join(" "));
            }
            let parts: Vec<String> = p.parts.iter().map(|(lo, hi)| format!("{}..{}", lo + 1, hi)).collect();
            let _ = writeln!(s, "parts {}", parts.join(" "));
            s
        }
    }))
}

fn swbound(a: &SwboundArgs, fmt: Format, seed: u64) -> Result<Outcome> {
    let model = read_model(&a.model)?;
    let pattern = a.pattern.as_deref().map(parse_pattern).transpose()?;
    let mode = match a.trials {
        Some(trials) => SwMode::Random { seed, trials },
        None => SwMode::Exhaustive,
    };
    let r = sw_generate(&model, a.n, mode, pattern.as_ref())?;
    let all = r.all_avoiding.map_or_else(|| "na".to_string(), |b| b.to_string());
    let text = match fmt {
        Format::Json => json(&r),
        Format::Csv => format!(
            "n,per_choice_total,valid_choices,distinct_count,nth_root,all_avoiding\n{},{},{},{},{},{all}\n",
            r.n, r.per_choice_total, r.valid_choices, r.distinct_count, r.nth_root
        ),
        Format::Text => format!(
            "n: {}\nchoices: {}\nvalid choices: {}\ndistinct: {}\nnth root: {}\nall avoiding: {all}\n",
            r.n, r.per_choice_total, r.valid_choices, r.distinct_count, r.nth_root
        ),
    };
    Ok(Outcome::negative_if(r.all_avoiding == Some(false), text))
}

#[derive(Serialize)]
struct DigitswapOut {
    pattern: String,
    depth: u32,
    tuples: String,
    occurrences: String,
    quotient_depth: u32,
    quotients: Vec<String>,
    quotients_ok: bool,
    involution_depth: u32,
    involution: bool,
}

fn digitswap(a: &DigitswapArgs, fmt: Format) -> Result<Outcome> {
    if a.depth > 5 || a.involution_depth > 12 || a.quotient_depth > 10 {
        return Err(Error::SizeLimit(
            "depths are limited to 5 (scan), 10 (quotients) and 12 (involution)".into(),
        ));
    }
    let pattern = parse_pattern(&a.pattern)?;
    let count = prefix_pattern_count(a.depth, &pattern)?;
    let quotients = difference_quotients(a.quotient_depth);
    let allowed = [q(-2, 1), q(-1, 1), q(-1, 2), q(1, 2), q(1, 1), q(2, 1)];
    let out = DigitswapOut {
        pattern: format_pattern(&pattern),
        depth: a.depth,
        tuples: binomial(1 << (2 * a.depth), pattern.order()).to_string(),
        occurrences: count.occurrences.to_string(),
        quotient_depth: a.quotient_depth,
        quotients: quotients.iter().map(format_rational).collect(),
        quotients_ok: quotients.iter().all(|v| allowed.contains(v)),
        involution_depth: a.involution_depth,
        involution: is_involution_at_depth(a.involution_depth),
    };
    let failed = count.occurrences > 0 || !out.quotients_ok || !out.involution;
    let text = match fmt {
        Format::Json => json(&out),
        Format::Csv => format!(
            "pattern,depth,tuples,occurrences,quotients_ok,involution\n{},{},{},{},{},{}\n",
            out.pattern, out.depth, out.tuples, out.occurrences, out.quotients_ok, out.involution
        ),
        Format::Text => format!(
            "pattern {} at depth {}: {} occurrences among {} tuples\ndifference quotients up to depth {}: {{{}}} {}\ninvolution at depth {}: {}\n",
            out.pattern,
            out.depth,
            out.occurrences,
            out.tuples,
            out.quotient_depth,
            out.quotients.join(", "),
            if out.quotients_ok { "ok" } else { "UNEXPECTED" },
            out.involution_depth,
            out.involution
        ),
    };
    Ok(Outcome::negative_if(failed, text))
}

fn molecules(a: &MoleculesArgs, fmt: Format) -> Result<Outcome> {
    let model = read_tracks(&a.model)?;
    let dir = match a.direction {
        DirectionArg::Vertical => Direction::Vertical,
        DirectionArg::Horizontal => Direction::Horizontal,
    };
    let p = model.molecule_profile(dir)?;
    Ok(Outcome::ok(match fmt {
        Format::Json => json(&p),
        Format::Csv => {
            let mut s = String::from("atoms,length\n");
            for (k, v) in &p.histogram {
                let _ = writeln!(s, "{k},{}", format_rational(v));
            }
            s
        }
        Format::Text => {
            let mut s = format!("max atoms: {}\n", p.max_atoms);
            for (k, v) in &p.histogram {
                let _ = writeln!(s, "{k} atoms: length {}", format_rational(v));
            }
            for c in &p.crossings {
                let _ = writeln!(
                    s,
                    "crossing in piece {} at ({}, {})",
                    c.piece + 1,
                    format_rational(&c.x),
                    format_rational(&c.y)
                );
            }
            s
        }
    }))
}

fn marginals(a: &ModelArg, fmt: Format) -> Result<Outcome> {
    let model = read_tracks(&a.model)?;
    let r = model.validate_marginals();
    let ok = r.x_ok && r.y_ok;
    let text = match fmt {
        Format::Json => json(&r),
        Format::Csv => format!(
            "x_ok,y_ok,max_deviation\n{},{},{}\n",
            r.x_ok,
            r.y_ok,
            format_rational(&r.max_deviation)
        ),
        Format::Text => {
            let mut s = format!(
                "x marginal uniform: {}\ny marginal uniform: {}\nmax deviation: {}\n",
                r.x_ok,
                r.y_ok,
                format_rational(&r.max_deviation)
            );
            for d in &r.diagnostics {
                let _ = writeln!(s, "{d}");
            }
            s
        }
    };
    Ok(Outcome::negative_if(!ok, text))
}

fn zigzag(a: &ZigzagArgs) -> Result<Outcome> {
    let pattern = parse_pattern(&a.pattern)?;
    let mut z = build_zigzag(&pattern)?;
    if a.transpose {
        z = z.transpose()?;
    }
    let mut s = Permuton::Tracks(z).to_json();
    s.push('\n');
    Ok(Outcome::ok(s))
}
