use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use he_core::arcs::{project_major, ArcConfig, MinorArcExperiment, OperatorRatio};
use he_core::ergodic::{equidistribution_trace, jump_experiment, ScaleSet, TorusArc, TorusSystem};
use he_core::expsum::{jittered_grid, major_arc_box, scan_point, OrbitTable, TorusPoint};
use he_core::hardy::{classify_family, family_orbits, HardyFunction};
use he_core::variation::{jump_count, vr_norm, IndexedSequence};

use crate::args::{parse_list, Cli, Command, Format, Params};
use crate::emit::{json, real, Csv};
use crate::{lattice_io, usage, CliError};

pub fn dispatch(cli: &Cli, p: &Params) -> Result<Vec<u8>, CliError> {
    match &cli.command {
        Command::ExpsumScan(a) => {
            let family = p.family(&a.family)?;
            let n: u64 = p.require(&a.n, "N")?;
            let l: i32 = p.require(&a.l, "l")?;
            let grid: usize = p.get(&a.grid, "grid")?.unwrap_or(64);
            expsum_scan(&family, n, l, grid, p.seed()?, p.format(Format::Csv)?)
        }
        Command::Variation(a) => {
            let values = p
                .raw(&a.values, "values")
                .ok_or_else(|| usage("missing required --values"))
                .and_then(|s| parse_values(&s))?;
            let indices: Option<Vec<u64>> = p.list(&a.indices, "indices")?;
            let r: f64 = p.get(&a.r, "r")?.unwrap_or(2.0);
            let deltas: Option<Vec<f64>> = p.list(&a.deltas, "deltas")?;
            variation(values, indices, r, deltas, p.format(Format::Json)?)
        }
        Command::Jumps(a) => {
            let family = p.family(&a.family)?;
            let xi: Vec<f64> = p.require_list(&a.xi, "xi")?;
            let n_max: u64 = p.require(&a.nmax, "nmax")?;
            let set = match p.get::<f64>(&a.lambda, "lambda")? {
                Some(lambda) => ScaleSet::Lacunary { lambda, n_max },
                None => ScaleSet::All { n_max },
            };
            let deltas: Vec<f64> = p.require_list(&a.deltas, "deltas")?;
            let r: f64 = p.get(&a.r, "r")?.unwrap_or(3.0);
            jumps(&family, xi, set, &deltas, r, p.format(Format::Csv)?)
        }
        Command::Equi(a) => {
            let family = p.family(&a.family)?;
            let alphas: Vec<f64> = p.require_list(&a.alphas, "alphas")?;
            let beta: Vec<i64> = p.list(&a.beta, "beta")?.unwrap_or_else(|| vec![1; alphas.len()]);
            let x0: Vec<f64> = p.list(&a.x0, "x0")?.unwrap_or_else(|| vec![0.0; alphas.len()]);
            let arcs = p
                .raw(&a.arcs, "arcs")
                .ok_or_else(|| usage("missing required --arcs"))
                .and_then(|s| parse_arcs(&s))?;
            let scales: Vec<u64> = match p.list(&a.scales, "scales")? {
                Some(s) => s,
                None => vec![p.require(&a.nmax, "nmax")?],
            };
            let system = TorusSystem::new(alphas, beta)?;
            let dens = equidistribution_trace(&system, &family, &x0, &arcs, &scales)?;
            equi(&scales, &dens, p.format(Format::Csv)?)
        }
        Command::Arcs(a) => {
            let family = p.family(&a.family)?;
            let mut cfg = ArcConfig::default();
            if let Some(g) = p.get(&a.grid, "grid")? {
                cfg.grid_size = g;
            }
            let ns: Vec<u64> = p.require_list(&a.n, "N")?;
            if let Some(path) = &a.lattice {
                let [n] = ns[..] else {
                    return Err(usage("--lattice takes a single --N"));
                };
                let f = lattice_io::load(path).map_err(|e| {
                    CliError::Runtime(anyhow::Error::new(e).context(format!("reading {}", path.display())))
                })?;
                return Ok(lattice_io::encode(&project_major(&cfg, &f, &family, n)?));
            }
            let ls: Vec<i32> = p.require_list(&a.l, "l")?;
            let trials: u64 = p.get(&a.trials, "trials")?.unwrap_or(32);
            if trials < 8 {
                return Err(usage("--trials must be at least 8"));
            }
            arcs_sweep(&cfg, &family, &ns, &ls, trials, p.seed()?, p.format(Format::Csv)?)
        }
        Command::Orbit(a) => {
            let family = p.family(&a.family)?;
            let n_max: u64 = p.require(&a.nmax, "nmax")?;
            orbit(&family, n_max, p.format(Format::Csv)?)
        }
    }
}

/// `re` or `re:im` tokens, comma-separated.
fn parse_values(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let bad = |_| usage(format!("invalid entry '{tok}' in --values"));
            match tok.split_once(':') {
                Some((re, im)) => Ok(Complex64::new(
                    re.trim().parse().map_err(bad)?,
                    im.trim().parse().map_err(bad)?,
                )),
                None => Ok(Complex64::new(tok.parse().map_err(bad)?, 0.0)),
            }
        })
        .collect()
}

/// `lo:hi` per dimension, comma-separated.
fn parse_arcs(s: &str) -> Result<Vec<TorusArc>, CliError> {
    s.split(',')
        .map(|tok| {
            let (lo, hi) = tok
                .split_once(':')
                .ok_or_else(|| usage(format!("arc '{tok}' is not of the form lo:hi")))?;
            let lo: f64 = parse_list(lo, "arcs")?[0];
            let hi: f64 = parse_list(hi, "arcs")?[0];
            TorusArc::from_bounds(lo, hi).map_err(|e| usage(format!("arc '{tok}': {e}")))
        })
        .collect()
}

#[derive(Serialize)]
struct ScanRow {
    xi: Vec<f64>,
    abs_m: f64,
    in_major_arc: bool,
}

#[derive(Serialize)]
struct ScanReport {
    #[serde(rename = "N")]
    n: u64,
    l: i32,
    points: Vec<ScanRow>,
}

fn expsum_scan(
    family: &[HardyFunction],
    n: u64,
    l: i32,
    grid: usize,
    seed: u64,
    fmt: Format,
) -> Result<Vec<u8>, CliError> {
    let table = OrbitTable::new(family, n)?;
    let major = major_arc_box(family, n, l)?;
    let points = jittered_grid(family.len(), grid, seed)?
        .into_par_iter()
        .map(|xi| scan_point(&table, n, &major, xi))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match fmt {
        Format::Csv => {
            let mut header = vec!["N".to_string(), "l".to_string()];
            header.extend((1..=family.len()).map(|i| format!("xi_{i}")));
            header.extend(["abs_m".to_string(), "in_major_arc".to_string()]);
            let mut csv = Csv::new(&header);
            for pt in &points {
                let mut row = vec![n.to_string(), l.to_string()];
                row.extend(pt.xi.coords().iter().map(|x| real(*x)));
                row.push(real(pt.abs_m));
                row.push(pt.in_major_arc.to_string());
                csv.row(&row);
            }
            csv.finish()
        }
        Format::Json => json(&ScanReport {
            n,
            l,
            points: points
                .into_iter()
                .map(|pt| ScanRow {
                    xi: pt.xi.coords().to_vec(),
                    abs_m: pt.abs_m,
                    in_major_arc: pt.in_major_arc,
                })
                .collect(),
        }),
    })
}

#[derive(Serialize)]
struct JumpEntry {
    delta: f64,
    count: usize,
}

#[derive(Serialize)]
struct VariationReport {
    value: f64,
    sup_term: f64,
    jump_term: f64,
    witness: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jumps: Option<Vec<JumpEntry>>,
}

fn variation(
    values: Vec<Complex64>,
    indices: Option<Vec<u64>>,
    r: f64,
    deltas: Option<Vec<f64>>,
    fmt: Format,
) -> Result<Vec<u8>, CliError> {
    let seq = match indices {
        Some(idx) => IndexedSequence::new(idx, values)?,
        None => IndexedSequence::from_values(values)?,
    };
    let res = vr_norm(&seq, r)?;
    let jumps = deltas
        .map(|ds| {
            ds.into_iter()
                .map(|delta| {
                    Ok(JumpEntry {
                        delta,
                        count: jump_count(&seq, delta)?,
                    })
                })
                .collect::<Result<Vec<_>, he_core::Error>>()
        })
        .transpose()?;
    Ok(match fmt {
        Format::Json => json(&VariationReport {
            value: res.value,
            sup_term: res.sup_term,
            jump_term: res.jump_term,
            witness: res.witness,
            jumps,
        }),
        Format::Csv => {
            let mut csv = Csv::new(&["index", "re", "im"]);
            for w in &res.witness {
                let pos = seq.indices().binary_search(w).expect("witness index in sequence");
                let z = seq.values()[pos];
                csv.row(&[w.to_string(), real(z.re), real(z.im)]);
            }
            csv.finish()
        }
    })
}

#[derive(Serialize)]
struct JumpsRow {
    delta: f64,
    count: usize,
    vr: f64,
    limit_re: f64,
    limit_im: f64,
}

#[derive(Serialize)]
struct JumpsReport {
    rows: Vec<JumpsRow>,
    slope: Option<f64>,
}

fn jumps(
    family: &[HardyFunction],
    xi: Vec<f64>,
    set: ScaleSet,
    deltas: &[f64],
    r: f64,
    fmt: Format,
) -> Result<Vec<u8>, CliError> {
    let report = jump_experiment(family, &TorusPoint::new(xi), set, deltas, r)?;
    Ok(match fmt {
        Format::Csv => {
            let mut csv = Csv::new(&["delta", "count", "vr", "limit_re", "limit_im", "slope"]);
            let slope = report.slope.map(real).unwrap_or_default();
            for row in &report.rows {
                csv.row(&[
                    real(row.delta),
                    row.count.to_string(),
                    real(row.vr),
                    real(row.limit.re),
                    real(row.limit.im),
                    slope.clone(),
                ]);
            }
            csv.finish()
        }
        Format::Json => json(&JumpsReport {
            rows: report
                .rows
                .iter()
                .map(|r| JumpsRow {
                    delta: r.delta,
                    count: r.count,
                    vr: r.vr,
                    limit_re: r.limit.re,
                    limit_im: r.limit.im,
                })
                .collect(),
            slope: report.slope,
        }),
    })
}

#[derive(Serialize)]
struct EquiRow {
    #[serde(rename = "N")]
    n: u64,
    density: f64,
}

fn equi(scales: &[u64], dens: &[f64], fmt: Format) -> Result<Vec<u8>, CliError> {
    Ok(match fmt {
        Format::Csv => {
            let mut csv = Csv::new(&["N", "density"]);
            for (n, d) in scales.iter().zip(dens) {
                csv.row(&[n.to_string(), real(*d)]);
            }
            csv.finish()
        }
        Format::Json => json(
            &scales
                .iter()
                .zip(dens)
                .map(|(&n, &density)| EquiRow { n, density })
                .collect::<Vec<_>>(),
        ),
    })
}

#[derive(Serialize)]
struct ArcsRow {
    #[serde(rename = "N")]
    n: u64,
    l: i32,
    trials: usize,
    max_ratio: f64,
    median_ratio: f64,
}

fn arcs_sweep(
    cfg: &ArcConfig,
    family: &[HardyFunction],
    ns: &[u64],
    ls: &[i32],
    trials: u64,
    seed: u64,
    fmt: Format,
) -> Result<Vec<u8>, CliError> {
    let mut rows = Vec::new();
    for &n in ns {
        for &l in ls {
            let exp = MinorArcExperiment::new(cfg, family, n, l)?;
            let ratios: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| exp.trial(seed, t))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect();
            let used = ratios.len();
            let r = OperatorRatio::from_ratios(ratios)?;
            rows.push(ArcsRow {
                n,
                l,
                trials: used,
                max_ratio: r.max,
                median_ratio: r.median,
            });
        }
    }
    Ok(match fmt {
        Format::Csv => {
            let mut csv = Csv::new(&["N", "l", "trials", "max_ratio", "median_ratio"]);
            for r in &rows {
                csv.row(&[
                    r.n.to_string(),
                    r.l.to_string(),
                    r.trials.to_string(),
                    real(r.max_ratio),
                    real(r.median_ratio),
                ]);
            }
            csv.finish()
        }
        Format::Json => json(&rows),
    })
}

#[derive(Serialize)]
struct OrbitReport {
    family: Vec<String>,
    verdict: String,
    violations: Vec<String>,
    orbits: Vec<Vec<i64>>,
}

fn orbit(family: &[HardyFunction], n_max: u64, fmt: Format) -> Result<Vec<u8>, CliError> {
    let orbits = family_orbits(family, n_max)?;
    Ok(match fmt {
        Format::Csv => {
            let mut header = vec!["n".to_string()];
            header.extend((1..=family.len()).map(|i| format!("floor_{i}")));
            let mut csv = Csv::new(&header);
            for n in 0..n_max as usize {
                let mut row = vec![(n + 1).to_string()];
                row.extend(orbits.iter().map(|o| o[n].to_string()));
                csv.row(&row);
            }
            csv.finish()
        }
        Format::Json => {
            let class = classify_family(family);
            json(&OrbitReport {
                family: family.iter().map(ToString::to_string).collect(),
                verdict: format!("{:?}", class.verdict),
                violations: class.violations,
                orbits,
            })
        }
    })
}
