//! Subcommand implementations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_traits::ToPrimitive;

use smells_core::bounds::{bilocal_ns_bound, local_bound, ns_bound, signaling_bound};
use smells_core::games::{family_f_n2, unanimous_to_game};
use smells_core::geometry::{facet_enumeration, VRepresentation};
use smells_core::strategies::{
    construct_unanimous_vertices, count_vertices_formula, enumerate_vertices, k_star,
    k_star_unanimous, EnumOptions, Mode, Scenario, VertexSet,
};
use smells_core::{InequalityFunctional, ResourceCaps};
use smells_quantum::io::{parse_strategy, write_strategy};
use smells_quantum::linalg::CMatrix;
use smells_quantum::{
    concurrence, horodecki_chsh, quantum_behavior, rho_p_theta, seesaw_at_k,
    seesaw_fixed_state, QuantumStrategy, SeesawOptions,
};

pub fn kstar(parties: usize, inputs: &str, unanimous: bool) -> Result<()> {
    let input_list: Vec<usize> = inputs
        .split(',')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .context("inputs must be integers")?;
    if parties < 2 || input_list.iter().any(|&m| m == 0) {
        bail!("need at least 2 parties and positive input counts");
    }
    if unanimous {
        let ms = if input_list.len() == 1 {
            vec![input_list[0]; parties]
        } else if input_list.len() == parties {
            input_list
        } else {
            bail!("inputs list length must be 1 or match --parties");
        };
        println!("{}", k_star_unanimous(&ms));
    } else {
        if input_list.len() != 1 {
            bail!("the homogeneous threshold takes a single input count");
        }
        println!("{}", k_star(parties, input_list[0]));
    }
    Ok(())
}

fn enum_options(no_saturation_cap: bool, caps: &ResourceCaps) -> EnumOptions {
    EnumOptions {
        cap_k_at_saturation: !no_saturation_cap,
        caps: caps.clone(),
    }
}

fn vertex_set(
    sc: &Scenario,
    no_saturation_cap: bool,
    constructive: bool,
    drop_all_different: bool,
    caps: &ResourceCaps,
) -> Result<VertexSet> {
    let vs = if constructive {
        if sc.mode() != Mode::Unanimous {
            bail!("--constructive applies to unanimous scenarios");
        }
        construct_unanimous_vertices(sc)?
    } else {
        enumerate_vertices(sc, &enum_options(no_saturation_cap, caps))?
    };
    Ok(if drop_all_different { vs.without_all_different() } else { vs })
}

pub fn vertices(
    scenario: &str,
    format: &str,
    no_saturation_cap: bool,
    constructive: bool,
    drop_all_different: bool,
    caps: &ResourceCaps,
) -> Result<()> {
    let sc: Scenario = scenario.parse()?;
    let vs = vertex_set(&sc, no_saturation_cap, constructive, drop_all_different, caps)?;
    match format {
        "csv" => print!("{}", vs.to_csv()),
        _ => {
            for v in vs.iter() {
                let row: Vec<&str> = (0..sc.coord_count())
                    .map(|c| if v.get(c) { "1" } else { "0" })
                    .collect();
                println!("{}", row.join(" "));
            }
        }
    }
    Ok(())
}

pub fn counts(scenario: &str, caps: &ResourceCaps) -> Result<()> {
    let sc: Scenario = scenario.parse()?;
    let formula = count_vertices_formula(&sc)?;
    let brute = enumerate_vertices(&sc, &enum_options(false, caps))?;
    println!("formula:     {formula}");
    println!("brute-force: {}", brute.len());
    Ok(())
}

pub fn facets(
    scenario: &str,
    no_saturation_cap: bool,
    drop_all_different: bool,
    caps: &ResourceCaps,
) -> Result<()> {
    let sc: Scenario = scenario.parse()?;
    let vs = vertex_set(&sc, no_saturation_cap, false, drop_all_different, caps)?;
    let v = VRepresentation::new(vs.rational_points(), sc.coord_count());
    let h = facet_enumeration(&v, caps)?;
    print!("{}", h.dump(&|c| sc.coord_name(c)));
    Ok(())
}

pub fn classify(
    scenario: &str,
    repo: Option<PathBuf>,
    drop_all_different: bool,
    no_standard_checks: bool,
    caps: &ResourceCaps,
) -> Result<()> {
    let sc: Scenario = scenario.parse()?;
    let vs = vertex_set(&sc, false, false, drop_all_different, caps)?;
    let report = crate::repo::classify_with_meta(&vs, caps, !no_standard_checks)?;
    print!("{}", report.summary());
    let repo = repo.or_else(|| std::env::var_os("SMELLS_REPO").map(PathBuf::from));
    if let Some(dir) = repo {
        let written = crate::repo::write_repository(&dir, &report)?;
        println!("repository: {} classes under {}", written, dir.display());
    }
    Ok(())
}

fn load_ineq(path: &Path) -> Result<InequalityFunctional> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(InequalityFunctional::parse_ineq(&text)?)
}

pub fn bound(bound_type: &str, k: Option<usize>, file: &Path, caps: &ResourceCaps) -> Result<()> {
    let ineq = load_ineq(file)?;
    let k = k.unwrap_or_else(|| ineq.scenario().outcomes());
    match bound_type {
        "local" => {
            let opts = EnumOptions { cap_k_at_saturation: true, caps: caps.clone() };
            let (value, witness) = local_bound(&ineq, k, &opts)?;
            println!("local bound (k={k}): {value}");
            let sc = ineq.scenario();
            let row: Vec<String> = (0..sc.coord_count())
                .map(|c| format!("{}={}", sc.coord_name(c), u8::from(witness.get(c))))
                .collect();
            println!("witness vertex: {}", row.join(" "));
        }
        "signaling" => {
            println!("signaling bound: {}", signaling_bound(&ineq));
        }
        "ns" => {
            let (value, witness) = ns_bound(&ineq, k)?;
            println!("no-signaling bound (k={k}): {value}");
            println!("witness behavior p(a|x), tuple-major:");
            let per_x = k.pow(ineq.scenario().parties() as u32);
            for (ti, chunk) in witness.probs.chunks(per_x).enumerate() {
                let xs: Vec<String> = ineq
                    .scenario()
                    .tuple(ti)
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                let vals: Vec<String> = chunk.iter().map(|p| p.to_string()).collect();
                println!("x=({}): {}", xs.join(","), vals.join(" "));
            }
        }
        "bilocal-ns" => {
            let value = bilocal_ns_bound(&ineq, k, caps)?;
            println!("bilocal-NS bound (k={k}): {value}");
        }
        other => bail!("unknown bound type {other}"),
    }
    Ok(())
}

pub fn game(path: &Path) -> Result<()> {
    let ineq = load_ineq(path)?;
    let transform = unanimous_to_game(&ineq)?;
    let sc = &transform.game.scenario;
    println!("game bound: {}", transform.game.local_value);
    println!("scale: {}  shift: {}", transform.scale, transform.shift);
    println!("prior:");
    for (&ti, mu) in &transform.game.prior {
        let xs: Vec<String> = sc.tuple(ti).iter().map(|v| v.to_string()).collect();
        println!("  mu(({})) = {}", xs.join(","), mu);
    }
    let fmt_set = |set: &[usize]| -> String {
        set.iter()
            .map(|&ti| {
                let xs: Vec<String> = sc.tuple(ti).iter().map(|v| v.to_string()).collect();
                format!("({})", xs.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("winning set (all equal): {}", fmt_set(&transform.game.equal_set));
    println!("losing-pattern set (not all equal): {}", fmt_set(&transform.game.different_set));
    Ok(())
}

pub fn family(name: &str, parties: usize, output: Option<&Path>) -> Result<()> {
    let ineq = match name {
        "f-n2" => {
            if parties < 2 {
                bail!("the family needs at least 2 parties");
            }
            family_f_n2(parties)
        }
        other => bail!("unknown family {other}"),
    };
    let text = ineq.to_ineq();
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn catalog_list() -> Result<()> {
    for name in smells_core::catalog::catalog_names() {
        println!("{name}");
    }
    Ok(())
}

pub fn catalog_show(name: &str) -> Result<()> {
    let entry = smells_core::catalog::catalog_get(name)?;
    print!("{}", entry.ineq.to_ineq());
    Ok(())
}

fn parse_rho_arg(arg: &str) -> Result<CMatrix> {
    let (p, theta) = arg
        .split_once(',')
        .context("--rho takes two comma-separated floats p,theta")?;
    let p: f64 = p.trim().parse().context("bad p")?;
    let theta: f64 = theta.trim().parse().context("bad theta")?;
    Ok(rho_p_theta(p, theta))
}

fn read_density(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows: Vec<Vec<num_complex::Complex64>> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Option<Vec<num_complex::Complex64>> = line
            .split_whitespace()
            .map(|tok| {
                let (re, im) = tok.split_once(',')?;
                Some(num_complex::Complex64::new(
                    re.parse().ok()?,
                    im.parse().ok()?,
                ))
            })
            .collect();
        rows.push(row.context("bad matrix entry; use re,im tokens")?);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("density matrix must be square");
    }
    let flat: Vec<num_complex::Complex64> = rows.into_iter().flatten().collect();
    Ok(CMatrix::from_row_slice(n, n, &flat))
}

#[allow(clippy::too_many_arguments)]
pub fn seesaw(
    dim: usize,
    restarts: usize,
    seed: u64,
    state: Option<&Path>,
    rho: Option<&str>,
    output: Option<&Path>,
    file: &Path,
    caps: &ResourceCaps,
) -> Result<()> {
    let ineq = load_ineq(file)?;
    let opts = SeesawOptions {
        restarts,
        seed,
        max_hilbert_dim: caps.max_hilbert_dim,
        ..Default::default()
    };
    let fixed: Option<CMatrix> = match (state, rho) {
        (Some(_), Some(_)) => bail!("--state and --rho are mutually exclusive"),
        (Some(path), None) => Some(read_density(path)?),
        (None, Some(arg)) => Some(parse_rho_arg(arg)?),
        (None, None) => None,
    };
    match fixed {
        Some(rho) => {
            let value = seesaw_fixed_state(&ineq, &rho, dim, &opts)?;
            println!("seesaw value (fixed state, d={dim}): {value}");
        }
        None => {
            let out = seesaw_at_k(&ineq, ineq.scenario().outcomes(), dim, &opts)?;
            println!("seesaw value (d={dim}): {}", out.value);
            if !out.converged {
                println!("note: some restart hit the pass cap; value is best-so-far");
            }
            let text = write_strategy(&out.strategy);
            match output {
                Some(path) => {
                    std::fs::write(path, text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("strategy written to {}", path.display());
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

pub fn quantum(
    rho: Option<&str>,
    state: Option<&Path>,
    strategy: Option<&Path>,
    ineq: Option<&Path>,
) -> Result<()> {
    let mut did_something = false;
    let density: Option<CMatrix> = match (rho, state) {
        (Some(_), Some(_)) => bail!("--rho and --state are mutually exclusive"),
        (Some(arg), None) => Some(parse_rho_arg(arg)?),
        (None, Some(path)) => Some(read_density(path)?),
        (None, None) => None,
    };
    if let Some(rho) = density {
        println!("concurrence: {}", concurrence(&rho)?);
        let m = horodecki_chsh(&rho)?;
        println!("horodecki M: {m}");
        println!(
            "CHSH violable: {}",
            if m > 1.0 { "yes (M > 1)" } else { "no (M <= 1)" }
        );
        did_something = true;
    }
    if let Some(path) = strategy {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let qs: QuantumStrategy = parse_strategy(&text)?;
        qs.validate()?;
        println!("strategy: {} parties, local dimension {}", qs.parties, qs.local_dim);
        if let Some(ineq_path) = ineq {
            let functional = load_ineq(ineq_path)?;
            let sc = functional.scenario().with_outcomes(qs.outcomes);
            let behavior = quantum_behavior(&qs, &sc)?;
            let value = functional.evaluate_f64(&behavior);
            println!("functional value: {value}");
            let bound = functional
                .bound()
                .to_f64()
                .context("bound does not fit in f64")?;
            println!("local bound: {bound}");
        }
        did_something = true;
    }
    if !did_something {
        bail!("nothing to do: pass --rho, --state, or --strategy");
    }
    Ok(())
}
