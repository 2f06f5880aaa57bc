use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use naimark::bell::{build_bell_naimark, fiducial_for_embedding, shift_decomposition};
use naimark::block::{
    assemble_u, block_circulant_residual, block_form_residual, catalog_m, complete_unitary_m, first_block_row,
    m_label_for_fiducial, recover_m, verify_block_constraints, M_CATALOG,
};
use naimark::circuit::{
    bell_circuit, controlled_powers, cx_qudit_circuit, cz_qudit_circuit, full_naimark_circuit, qudit_fourier_circuit,
    MSource,
};
use naimark::fiducials::{catalog_fiducial, compound_sic_report, is_informationally_complete, CATALOG};
use naimark::io::{CircuitFile, KetFile, MatrixFile};
use naimark::simulate::{direct_probabilities, measure_probabilities, sample};
use naimark::wh::{clock_op, fourier, shift_op};
use naimark::{ComplexMatrix, Fiducial, GateList, Ket, NaimarkExtension, C};
use serde_json::{json, Value};

use crate::{BuildArgs, CircuitArgs, Construction, FiducialSource, SimulateArgs, Target, VerifyArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(report: &Value, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match out {
        Some(path) => write(path, &text),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
            other => Ok(other?),
        },
    }
}

fn load_matrix(path: &Path) -> Result<(usize, ComplexMatrix)> {
    let file = MatrixFile::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let m = file.to_matrix().with_context(|| format!("parsing {}", path.display()))?;
    Ok((file.d, m))
}

/// Accepts `{"re": [...], "im": [...]}`, a bare real array, or `[re, im]` pairs.
fn parse_amplitudes(text: &str) -> Result<Vec<C<f64>>> {
    if let Ok(file) = KetFile::from_json(text) {
        return Ok(file.amplitudes()?);
    }
    if let Ok(re) = serde_json::from_str::<Vec<f64>>(text) {
        return Ok(re.into_iter().map(|x| C::new(x, 0.0)).collect());
    }
    if let Ok(pairs) = serde_json::from_str::<Vec<[f64; 2]>>(text) {
        return Ok(pairs.into_iter().map(|[re, im]| C::new(re, im)).collect());
    }
    bail!("cannot parse ket {text:?}: expected {{\"re\":[..],\"im\":[..]}}, [re,..] or [[re,im],..]")
}

/// The fiducial and the catalog `M` label that pairs with it, if any.
fn load_fiducial(src: &FiducialSource, tol: f64) -> Result<Option<(Fiducial, Option<&'static str>)>> {
    let (label, amps) = match (&src.catalog, &src.ket, &src.ket_file) {
        (Some(label), _, _) => {
            let f = catalog_fiducial(label)?;
            return Ok(Some((f, m_label_for_fiducial(label))));
        }
        (_, Some(text), _) => ("inline", parse_amplitudes(text)?),
        (_, _, Some(path)) => ("file", parse_amplitudes(&read(path)?)?),
        _ => return Ok(None),
    };
    Ok(Some((Fiducial::new(label, amps, tol)?, None)))
}

fn choose_m(f: &Fiducial, m_label: Option<&str>) -> Result<(ComplexMatrix, String)> {
    Ok(match m_label {
        Some(label) => (catalog_m(f.dim(), label)?, format!("catalog:{label}")),
        None => (complete_unitary_m(f), "completed".to_string()),
    })
}

fn extend(m: &ComplexMatrix, construction: Construction) -> Result<NaimarkExtension> {
    Ok(match construction {
        Construction::Block => assemble_u(m)?,
        Construction::Bell => build_bell_naimark(m)?,
    })
}

fn matrix_value(d: usize, m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixFile::from_matrix(d, m)).expect("plain data serializes")
}

/// JSON has no infinities; report them as null.
fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn build(args: &BuildArgs, tol: f64) -> Result<bool> {
    let (f, m_label) =
        load_fiducial(&args.source, tol)?.ok_or_else(|| anyhow!("one of --catalog, --ket, --ket-file is required"))?;
    let d = f.dim();
    let (m, m_source) = choose_m(&f, m_label)?;
    let ext = extend(&m, args.construction)?;
    let residual = ext.u.unitarity_residual();

    let ic = is_informationally_complete(&f, tol);
    let mut warnings = Vec::new();
    if !ic.complete {
        let w = format!(
            "fiducial is not informationally complete (effect Gram rank {} < {}); the POVM is valid but cannot do tomography",
            ic.gram_rank,
            d * d
        );
        eprintln!("warning: {w}");
        warnings.push(w);
    }

    let mut report = json!({
        "dim": d,
        "fiducial": f.label(),
        "construction": ext.provenance.as_str(),
        "m_source": m_source,
        "unitarity_residual": residual,
        "informationally_complete": ic.complete,
        "gram_rank": ic.gram_rank,
        "warnings": warnings,
    });
    match &args.out {
        Some(path) => write(path, &MatrixFile::from_matrix(d, &ext.u).to_json())?,
        None => report["u"] = matrix_value(d, &ext.u),
    }
    match &args.m_out {
        Some(path) => write(path, &MatrixFile::from_matrix(d, &m).to_json())?,
        None => report["m"] = matrix_value(d, &m),
    }
    emit(&report, None)?;
    Ok(residual <= tol)
}

struct Checks {
    tol: f64,
    items: Vec<Value>,
    passed: bool,
}

impl Checks {
    fn record(&mut self, name: &str, residual: f64) {
        let ok = residual <= self.tol;
        self.passed &= ok;
        self.items.push(json!({ "name": name, "residual": finite(residual), "passed": ok }));
    }

    fn fail(&mut self, name: &str, reason: String) {
        self.passed = false;
        self.items.push(json!({ "name": name, "residual": null, "passed": false, "reason": reason }));
    }
}

pub fn verify(args: &VerifyArgs, tol: f64) -> Result<bool> {
    let (d, u) = load_matrix(&args.u)?;
    let m = args.m.as_deref().map(load_matrix).transpose()?;
    let mut checks = Checks { tol, items: Vec::new(), passed: true };
    let mut sic = Value::Null;

    if u.rows() != d * d || u.cols() != d * d {
        checks.fail("shape", format!("U is {}x{}, expected {}x{}", u.rows(), u.cols(), d * d, d * d));
    } else {
        checks.record("unitarity", u.unitarity_residual());
        checks.record("block_circulant", block_circulant_residual(&u, d));
        checks.record("block_form", block_form_residual(&u, d)?);
        checks.record("block_constraints", verify_block_constraints(&first_block_row(&u, d)));
        let recovered = recover_m(&u, d)?;
        let m_for_sic = match &m {
            Some((_, m)) if m.rows() != d || m.cols() != d => {
                checks.fail("m_shape", format!("M is {}x{}, expected {d}x{d}", m.rows(), m.cols()));
                None
            }
            Some((_, m)) => {
                checks.record("m_unitarity", m.unitarity_residual());
                checks.record("m_consistency", recovered.max_abs_diff(m));
                Some(m)
            }
            None => Some(&recovered),
        };
        if let Some(m) = m_for_sic.filter(|m| m.is_unitary(tol)) {
            let residuals = compound_sic_report(m, tol)?;
            let rows: Vec<usize> = (0..residuals.len()).filter(|&i| residuals[i] <= tol).collect();
            sic = json!({ "row_residuals": residuals, "sic_rows": rows });
        }
    }

    let report = json!({
        "dim": d,
        "tol": tol,
        "passed": checks.passed,
        "checks": checks.items,
        "sic": sic,
    });
    emit(&report, args.out.as_ref())?;
    Ok(checks.passed)
}

pub fn simulate(args: &SimulateArgs, tol: f64) -> Result<bool> {
    let (m, m_source) = match &args.m {
        Some(path) => (load_matrix(path)?.1, format!("file:{}", path.display())),
        None => {
            let (f, m_label) = load_fiducial(&args.source, tol)?
                .ok_or_else(|| anyhow!("one of --catalog, --ket, --ket-file, --m is required"))?;
            choose_m(&f, m_label)?
        }
    };
    let d = m.rows();
    let psi = match (&args.state, &args.state_file, args.basis) {
        (Some(text), _, _) => Ket::normalized(parse_amplitudes(text)?, tol)?,
        (_, Some(path), _) => Ket::normalized(parse_amplitudes(&read(path)?)?, tol)?,
        (_, _, k) => Ket::basis(d, k.unwrap_or(0))?,
    };
    if psi.dim() != d {
        bail!("state has dimension {}, M has dimension {d}", psi.dim());
    }
    let ext = extend(&m, args.construction)?;
    let dist = measure_probabilities(&ext, &psi, args.embedding)?;
    let fiducial = fiducial_for_embedding(&m, args.embedding)?;

    let mut report = json!({
        "dim": d,
        "embedding": args.embedding,
        "construction": ext.provenance.as_str(),
        "m_source": m_source,
        "fiducial": KetFile::from_ket(fiducial.ket()),
        "probabilities": dist.as_grid(),
        "total": dist.total(),
    });
    if args.shots > 0 {
        let counts = sample(&dist, args.shots, args.seed)?;
        report["shots"] = json!(args.shots);
        report["seed"] = json!(args.seed);
        report["counts"] = json!(counts.as_grid());
    }
    let mut passed = true;
    if args.check {
        let deviation = dist.max_abs_diff(&direct_probabilities(&fiducial, &psi)?);
        passed = deviation <= tol;
        report["check"] = json!({ "max_deviation": deviation, "passed": passed });
    }
    emit(&report, args.out.as_ref())?;
    Ok(passed)
}

fn m_source_for(args: &CircuitArgs, d: usize) -> Result<(MSource<f64>, ComplexMatrix)> {
    if let Some(path) = &args.m {
        let (_, m) = load_matrix(path)?;
        return Ok((MSource::Matrix(m.clone()), m));
    }
    if let Some(label) = &args.m_catalog {
        let m = catalog_m(d, label)?;
        return Ok((MSource::Matrix(m.clone()), m));
    }
    if let Some(path) = &args.m_circuit {
        let list: GateList =
            CircuitFile::from_json(&read(path)?)?.to_gate_list().with_context(|| format!("parsing {}", path.display()))?;
        let m = list.expand()?;
        return Ok((MSource::Circuit(list), m));
    }
    bail!("the naimark target needs one of --m, --m-catalog, --m-circuit")
}

pub fn circuit(args: &CircuitArgs, tol: f64) -> Result<bool> {
    let n = args.n;
    if n == 0 || n > 8 {
        bail!("--n must be between 1 and 8");
    }
    let d = 1usize << n;
    let has_m = args.m.is_some() || args.m_catalog.is_some() || args.m_circuit.is_some();
    if has_m && args.target != Target::Naimark {
        bail!("an M source only applies to the naimark target");
    }
    let (list, closed): (GateList, Box<dyn Fn() -> Result<ComplexMatrix>>) = match args.target {
        Target::Cz => (cz_qudit_circuit(n)?, Box::new(move || Ok(controlled_powers(&clock_op(d)?)))),
        Target::Cx => (cx_qudit_circuit(n)?, Box::new(move || Ok(controlled_powers(&shift_op(d)?)))),
        Target::Fourier => (qudit_fourier_circuit(n)?, Box::new(move || Ok(fourier(d)?))),
        Target::Bell => (bell_circuit(n)?, Box::new(move || Ok(shift_decomposition(d)?))),
        Target::Naimark => {
            let (source, m) = m_source_for(args, d)?;
            (full_naimark_circuit(&source, n)?, Box::new(move || Ok(build_bell_naimark(&m)?.u)))
        }
    };

    let mut report = json!({
        "target": format!("{:?}", args.target).to_lowercase(),
        "n": n,
        "dim": d,
        "gate_count": list.len(),
        "circuit": serde_json::to_value(CircuitFile::from_gate_list(&list))?,
    });
    let mut passed = true;
    if args.expand {
        let expanded = list.expand()?;
        let residual = expanded.max_abs_diff(&closed()?);
        passed = residual <= tol;
        report["expanded"] = matrix_value(d, &expanded);
        report["closed_form_residual"] = json!(residual);
        report["passed"] = json!(passed);
    }
    emit(&report, args.out.as_ref())?;
    Ok(passed)
}

pub fn catalog() -> Result<bool> {
    let fiducials: Vec<Value> = CATALOG
        .iter()
        .map(|&(d, label)| {
            let f: Fiducial = catalog_fiducial(label)?;
            Ok(json!({
                "dim": d,
                "label": label,
                "m": m_label_for_fiducial(label),
                "ket": KetFile::from_ket(f.ket()),
            }))
        })
        .collect::<Result<_>>()?;
    let ms: Vec<Value> = M_CATALOG.iter().map(|&(d, label)| json!({ "dim": d, "label": label })).collect();
    emit(&json!({ "fiducials": fiducials, "m": ms }), None)?;
    Ok(true)
}
