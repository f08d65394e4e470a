use anyhow::{bail, Context, Result};
use mongefoil_core::extremal::{canonicalize, solve_extremal, solve_with_rule, CenterRule};
use mongefoil_core::robin::robin_function;
use mongefoil_core::vk::{vk_eval, EvalStatus, VkOptions};
use mongefoil_core::{ConvexBody, Error as CoreError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::body::{BodySpec, Normalization};
use crate::output::{complex_columns, complex_header, num, text, LeafRecord};
use crate::{parse, verify, Cli, Command, Global, Outcome};

/// A body as solved, with the map back to the caller's coordinates.
pub struct Loaded {
    pub spec: BodySpec,
    pub body: ConvexBody,
    pub norm: Normalization,
}

impl Loaded {
    pub fn new(spec: BodySpec, rescale: bool) -> Result<Self> {
        let (spec, norm) = if rescale {
            spec.normalized()?
        } else {
            let n = spec.dim();
            (spec, Normalization::identity(n))
        };
        let body = spec.build()?;
        Ok(Loaded { spec, body, norm })
    }

    fn point(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .zip(&self.norm.shift)
            .map(|(c, s)| (c - s) / self.norm.scale)
            .collect()
    }

    fn direction(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().map(|c| c / self.norm.scale).collect()
    }

    fn check_dim(&self, what: &str, len: usize) -> Result<()> {
        if len != self.body.dim() {
            bail!("{what} has {len} coordinates but the body has dimension {}", self.body.dim());
        }
        Ok(())
    }
}

pub fn vk_options(g: &Global) -> VkOptions {
    VkOptions {
        tol: g.tol,
        ..VkOptions::default()
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let load = |path: &std::path::Path| Loaded::new(BodySpec::read(path)?, g.rescale);
    match &cli.command {
        Command::Extremal { body, dir, center } => extremal(&load(body)?, dir, center.as_deref()),
        Command::Vk { body, point, points, grid } => {
            let loaded = load(body)?;
            let mut zs = point.iter().map(|p| parse::complex_vector(p)).collect::<Result<Vec<_>>>()?;
            if let Some(path) = points {
                zs.extend(parse::vector_file(path)?);
            }
            if let Some(spec) = grid {
                zs.extend(parse::grid(spec, loaded.body.dim())?);
            }
            if zs.is_empty() {
                bail!("no points given (use --point, --points or --grid)");
            }
            vk(&loaded, &zs, g)
        }
        Command::Robin { body, dir, dirs } => {
            let loaded = load(body)?;
            let mut vs = dir.iter().map(|p| parse::complex_vector(p)).collect::<Result<Vec<_>>>()?;
            if let Some(path) = dirs {
                vs.extend(parse::vector_file(path)?);
            }
            if vs.is_empty() {
                bail!("no directions given (use --dir or --dirs)");
            }
            robin(&loaded, &vs, g)
        }
        Command::IndicatrixSlice { body, e1, e2, s, t } => {
            let loaded = load(body)?;
            let e1 = parse::complex_vector(e1)?;
            let e2 = parse::complex_vector(e2)?;
            indicatrix_slice(&loaded, &e1, &e2, &parse::range(s)?, &parse::range(t)?, g)
        }
        Command::Symmetrize { body } => {
            let spec = BodySpec::read(body)?.symmetrized()?;
            Ok(Outcome {
                text: serde_json::to_string(&spec)? + "\n",
                code: 0,
            })
        }
        Command::Foliate { body, count } => foliate(&load(body)?, *count, g.seed),
        Command::Verify { body, suite } => {
            let loaded = load(body)?;
            let report = verify::run(&loaded, *suite, g.seed, &vk_options(g))?;
            Ok(Outcome {
                text: serde_json::to_string_pretty(&report)? + "\n",
                code: if report.passed { 0 } else { 1 },
            })
        }
    }
}

fn extremal(loaded: &Loaded, dir: &str, center: Option<&str>) -> Result<Outcome> {
    let v = parse::complex_vector(dir)?;
    loaded.check_dim("direction", v.len())?;
    let d = canonicalize(&loaded.direction(&v))?;
    let rule = match center {
        None => CenterRule::Barycenter,
        Some(text) => {
            let c: Vec<f64> = text
                .split(',')
                .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad center coordinate {s:?}")))
                .collect::<Result<_>>()?;
            loaded.check_dim("center", c.len())?;
            CenterRule::Given(loaded.norm.forward(&c))
        }
    };
    let disk = solve_with_rule(&loaded.body, &d, &rule)?;
    let record = LeafRecord::new(&disk, &v, &loaded.norm);
    Ok(Outcome {
        text: serde_json::to_string(&record)? + "\n",
        code: 0,
    })
}

fn status_name(s: EvalStatus) -> &'static str {
    match s {
        EvalStatus::Converged => "converged",
        EvalStatus::Fallback => "fallback",
        EvalStatus::Boundary => "boundary",
    }
}

fn vk(loaded: &Loaded, zs: &[Vec<Complex64>], g: &Global) -> Result<Outcome> {
    for z in zs {
        loaded.check_dim("point", z.len())?;
    }
    let opts = vk_options(g);
    let rows: Vec<(String, bool)> = zs
        .par_iter()
        .map(|z| {
            let mut cols = complex_columns(z);
            let ok = match vk_eval(&loaded.body, &loaded.point(z), &opts) {
                Ok(r) => {
                    cols.extend([num(r.value), status_name(r.status).into(), num(r.residual * loaded.norm.scale)]);
                    true
                }
                Err(e) => {
                    let residual = match e {
                        CoreError::Convergence { residual, .. } => residual * loaded.norm.scale,
                        _ => f64::NAN,
                    };
                    log::warn!("vk failed at {z:?}: {e}");
                    cols.extend(["NaN".into(), "failed".into(), num(residual)]);
                    false
                }
            };
            (cols.join(","), ok)
        })
        .collect();
    let mut header = complex_header("z", loaded.body.dim());
    header.extend(["V", "status", "residual"].map(String::from));
    finish_csv(header, rows, g.strict)
}

fn finish_csv(header: Vec<String>, rows: Vec<(String, bool)>, strict: bool) -> Result<Outcome> {
    let failed = rows.iter().filter(|(_, ok)| !ok).count();
    let mut out = header.join(",") + "\n";
    for (row, _) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    if failed > 0 {
        log::warn!("{failed} row(s) failed");
    }
    Ok(Outcome {
        text: out,
        code: if strict && failed > 0 { 3 } else { 0 },
    })
}

fn robin(loaded: &Loaded, vs: &[Vec<Complex64>], g: &Global) -> Result<Outcome> {
    for v in vs {
        loaded.check_dim("direction", v.len())?;
    }
    let rows: Vec<(String, bool)> = vs
        .par_iter()
        .map(|v| {
            let mut cols = complex_columns(v);
            let ok = match robin_function(&loaded.body, &loaded.direction(v)) {
                Ok(r) => {
                    cols.extend([num(r.value), num(r.rho_used), "ok".into()]);
                    true
                }
                Err(e) => {
                    cols.extend(["NaN".into(), "NaN".into(), text(&format!("error: {e}"))]);
                    false
                }
            };
            (cols.join(","), ok)
        })
        .collect();
    let mut header = complex_header("v", loaded.body.dim());
    header.extend(["robin", "boundary_scale", "status"].map(String::from));
    finish_csv(header, rows, g.strict)
}

fn indicatrix_slice(loaded: &Loaded, e1: &[Complex64], e2: &[Complex64], s: &[f64], t: &[f64], g: &Global) -> Result<Outcome> {
    loaded.check_dim("e1", e1.len())?;
    loaded.check_dim("e2", e2.len())?;
    let pairs: Vec<(f64, f64)> = s.iter().flat_map(|&a| t.iter().map(move |&b| (a, b))).collect();
    let rows: Vec<(String, bool)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let v: Vec<Complex64> = e1.iter().zip(e2).map(|(x, y)| x * a + y * b).collect();
            let (value, status, ok) = if v.iter().all(|c| c.norm() == 0.0) {
                ("-inf".to_string(), "origin".to_string(), true)
            } else {
                match robin_function(&loaded.body, &loaded.direction(&v)) {
                    Ok(r) => (num(r.value), "ok".to_string(), true),
                    Err(e) => ("NaN".to_string(), text(&format!("error: {e}")), false),
                }
            };
            (format!("{},{},{value},{status}", num(a), num(b)), ok)
        })
        .collect();
    finish_csv(["s", "t", "robin", "status"].map(String::from).to_vec(), rows, g.strict)
}

/// Seeded directions, uniform on the unit sphere of C^n.
pub fn random_directions(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<Complex64>> {
    let gauss = |rng: &mut ChaCha8Rng| {
        // Box-Muller
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        (-2.0 * u.ln()).sqrt() * Complex64::from_polar(1.0, t)
    };
    (0..count)
        .map(|_| {
            let v: Vec<Complex64> = (0..n).map(|_| gauss(rng)).collect();
            let len = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / len).collect()
        })
        .collect()
}

fn foliate(loaded: &Loaded, count: usize, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = random_directions(&mut rng, loaded.body.dim(), count);
    let records: Vec<LeafRecord> = dirs
        .par_iter()
        .map(|v| {
            let d = canonicalize(&loaded.direction(v))?;
            let disk = solve_extremal(&loaded.body, &d)?;
            Ok(LeafRecord::new(&disk, v, &loaded.norm))
        })
        .collect::<Result<_, CoreError>>()?;
    Ok(Outcome {
        text: serde_json::to_string(&records)? + "\n",
        code: 0,
    })
}
