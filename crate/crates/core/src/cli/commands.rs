use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{read_bytes, read_text, write_file, CliError, OrderSpec, RunConfig, EXIT_OK, EXIT_UNSAT};
use crate::algebra::{ConstraintSet, Var};
use crate::analysis::{
    format_ordering_file, metrics, ordering_corr, ordering_kde, ordering_random, parse_ordering_file, VariableOrdering,
};
use crate::compiler::{compile, read_artifact, write_artifact, CompileConfig, CompiledLayer, Verdict};
use crate::dataset::Dataset;
use crate::lang::{load_constraints, print_constraint, BindingSource, LangError, NormalizationConfig, VariableBinding};
use crate::refiner::{refine_rows, Provenance, RefineConfig, RefineError, Refiner};

fn lang_error(path: &Path, e: LangError) -> CliError {
    match e {
        LangError::Parse(p) => CliError::Input { path: path.to_path_buf(), message: p.to_string() },
        e => CliError::input(path, e),
    }
}

fn load_set(
    path: &Path,
    header: Option<&[String]>,
    cfg: &RunConfig,
) -> Result<(VariableBinding, ConstraintSet), CliError> {
    let text = read_text(path)?;
    let ncfg = NormalizationConfig { epsilon: cfg.tuning.epsilon.clone(), max_clauses: cfg.tuning.max_clauses };
    load_constraints(&text, header, &ncfg).map_err(|e| lang_error(path, e))
}

fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    Dataset::parse(&read_bytes(path)?).map_err(|e| CliError::input(path, e))
}

fn columns(ds: &Dataset, names: &[String], path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let idx = ds.column_indices(names).map_err(|e| CliError::input(path, e))?;
    Ok(ds.select(&idx))
}

type Rows = Vec<Vec<f64>>;

/// Synthetic data for the data-driven orderings.
struct OrderingData<'a> {
    data: Option<(&'a Dataset, &'a Path)>,
    reference: Option<&'a Path>,
}

fn resolve_ordering(names: &[String], inputs: &OrderingData, cfg: &RunConfig) -> Result<VariableOrdering, CliError> {
    let d = names.len();
    let pair = || -> Result<(Rows, Rows), CliError> {
        let (Some((syn, syn_path)), Some(real_path)) = (inputs.data, inputs.reference) else {
            return Err(CliError::Usage("corr and kde orderings need both --data and --reference".into()));
        };
        let real = load_dataset(real_path)?;
        Ok((columns(&real, names, real_path)?, columns(syn, names, syn_path)?))
    };
    let o = match &cfg.tuning.order {
        OrderSpec::Given => VariableOrdering::given(d),
        OrderSpec::Random(seed) => ordering_random(d, seed.unwrap_or(cfg.tuning.seed)),
        OrderSpec::Corr => {
            let (real, syn) = pair()?;
            ordering_corr(&real, &syn).map_err(|e| CliError::Usage(e.to_string()))?
        }
        OrderSpec::Kde(bins) => {
            let (real, syn) = pair()?;
            ordering_kde(&real, &syn, *bins).map_err(|e| CliError::Usage(e.to_string()))?
        }
        OrderSpec::File(p) => parse_ordering_file(&read_text(p)?, names).map_err(|e| CliError::input(p, e))?,
    };
    log::info!("ordering ({}): {}", o.method, o.names(names).join(", "));
    Ok(o)
}

fn compile_layer(path: &Path, set: &ConstraintSet, order: &[Var], cfg: &RunConfig) -> Result<CompiledLayer, CliError> {
    let ccfg = CompileConfig { max_resolvents: cfg.tuning.max_resolvents };
    compile(set, order, cfg.tuning.epsilon.clone(), &ccfg).map_err(|e| CliError::input(path, e))
}

fn verdict_text(layer: &CompiledLayer, binding: &VariableBinding) -> String {
    match layer.verdict() {
        Verdict::Sat => "sat\n".to_string(),
        Verdict::Unsat(w) => format!("unsat\nwitness: {}\n", print_constraint(w, binding)),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source: e }
}

pub fn cmd_compile(
    constraints: &Path,
    data: Option<&Path>,
    reference: Option<&Path>,
    out_path: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let ds = data.map(load_dataset).transpose()?;
    let (binding, set) = load_set(constraints, ds.as_ref().map(Dataset::header), cfg)?;
    let inputs = OrderingData { data: ds.as_ref().zip(data), reference };
    let order = resolve_ordering(binding.names(), &inputs, cfg)?;
    let layer = compile_layer(constraints, &set, &order.order, cfg)?;
    let artifact = write_artifact(&layer, binding.names()).map_err(|e| CliError::input(constraints, e))?;

    let mut report = String::new();
    for s in layer.stats().iter().rev() {
        let _ = writeln!(
            report,
            "eliminate {}: +{} -{} ~{} free {} closure {} resolvents {} -> {}",
            binding.names()[s.var],
            s.plus,
            s.minus,
            s.mixed,
            s.free,
            s.plusplus,
            s.resolvents,
            s.result
        );
    }
    let _ = writeln!(report, "total resolvents {}", layer.total_resolvents());
    report.push_str(&verdict_text(&layer, &binding));

    match out_path {
        Some(p) => {
            write_file(p, artifact.as_bytes())?;
            out.write_all(report.as_bytes()).map_err(io)?;
        }
        None => {
            out.write_all(artifact.as_bytes()).map_err(io)?;
            err.write_all(report.as_bytes()).map_err(io)?;
        }
    }
    Ok(if layer.is_sat() { EXIT_OK } else { EXIT_UNSAT })
}

pub fn cmd_sat(constraints: &Path, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let (binding, set) = load_set(constraints, None, cfg)?;
    let order = resolve_ordering(binding.names(), &OrderingData { data: None, reference: None }, cfg)?;
    let layer = compile_layer(constraints, &set, &order.order, cfg)?;
    out.write_all(verdict_text(&layer, &binding).as_bytes()).map_err(io)?;
    Ok(if layer.is_sat() { EXIT_OK } else { EXIT_UNSAT })
}

pub fn cmd_check(
    constraints: &Path,
    data: &Path,
    report: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let ds = load_dataset(data)?;
    let (binding, set) = load_set(constraints, Some(ds.header()), cfg)?;
    let rows = columns(&ds, binding.names(), data)?;
    let m = metrics(&set, &rows, cfg.tuning.tau).map_err(|e| CliError::input(data, e))?;
    let mut text = m.summary();
    for (c, n) in set.constraints().iter().zip(&m.per_constraint_violation_counts) {
        if *n > 0 {
            let _ = writeln!(text, "  {n:>8}  {}", print_constraint(c, &binding));
        }
    }
    out.write_all(text.as_bytes()).map_err(io)?;
    if let Some(p) = report {
        let mut json = serde_json::to_string_pretty(&m).expect("metrics serialize");
        json.push('\n');
        write_file(p, json.as_bytes())?;
    }
    Ok(EXIT_OK)
}

pub enum LayerSource {
    Constraints(PathBuf),
    Compiled(PathBuf),
}

pub struct RefineFiles {
    pub data: PathBuf,
    pub reference: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub jacobian: bool,
}

fn jacobian_csv(names: &[String], rows: &[(usize, &[f64])]) -> Vec<u8> {
    let d = names.len();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["row".to_string(), "output".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header).expect("write to memory");
    for (row, jac) in rows {
        for (i, name) in names.iter().enumerate() {
            let mut rec = vec![row.to_string(), name.clone()];
            rec.extend(jac[i * d..(i + 1) * d].iter().map(f64::to_string));
            w.write_record(&rec).expect("write to memory");
        }
    }
    w.into_inner().expect("flush to memory")
}

pub fn cmd_refine(
    source: &LayerSource,
    files: &RefineFiles,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let ds = load_dataset(&files.data)?;
    let (layer, names, set, origin) = match source {
        LayerSource::Constraints(p) => {
            let (binding, set) = load_set(p, Some(ds.header()), cfg)?;
            let inputs = OrderingData { data: Some((&ds, &files.data)), reference: files.reference.as_deref() };
            let order = resolve_ordering(binding.names(), &inputs, cfg)?;
            let layer = compile_layer(p, &set, &order.order, cfg)?;
            (layer, binding.names().to_vec(), set, p)
        }
        LayerSource::Compiled(p) => {
            let (layer, names) = read_artifact(&read_text(p)?).map_err(|e| CliError::input(p, e))?;
            let d = layer.dimension();
            let input = if d == 0 { Vec::new() } else { layer.level(d - 1).to_vec() };
            let set = ConstraintSet::new(d, input).map_err(|e| CliError::input(p, e))?;
            (layer, names, set, p)
        }
    };
    let binding = VariableBinding::new(names.clone(), BindingSource::Declared).map_err(|e| lang_error(origin, e))?;
    if let Verdict::Unsat(w) = layer.verdict() {
        return Err(CliError::Unsat(format!("witness `{}`", print_constraint(w, &binding))));
    }
    let cols = ds.column_indices(&names).map_err(|e| CliError::input(&files.data, e))?;
    let rows = ds.select(&cols);
    let refiner = Refiner::new(&layer).map_err(|e| CliError::Numeric(e.to_string()))?;
    let rcfg = RefineConfig { tau: cfg.tuning.tau, ..RefineConfig::default() };
    let output =
        refine_rows(&refiner, &rows, &rcfg, files.jacobian, cfg.tuning.parallelism, cfg.skip_errors).map_err(|e| {
            match e.error {
                RefineError::NumericFailure { .. } => CliError::Numeric(e.to_string()),
                RefineError::Unsat(w) => CliError::Unsat(w),
                _ => CliError::input(&files.data, e),
            }
        })?;
    for s in &output.skipped {
        let _ = writeln!(err, "skipped {s}");
    }

    let mut full = ds.rows().to_vec();
    let mut refined_ok = Vec::with_capacity(rows.len());
    for (row, r) in full.iter_mut().zip(&output.results) {
        if let Some(r) = r {
            for (&c, &v) in cols.iter().zip(&r.refined) {
                row[c] = v;
            }
            refined_ok.push(r.refined.clone());
        }
    }
    let check = metrics(&set, &refined_ok, cfg.tuning.tau).map_err(|e| CliError::Numeric(e.to_string()))?;
    if check.cvr > 0.0 {
        return Err(CliError::Numeric(format!(
            "self-check failed: {} refined rows still violate the constraints",
            check.violating_rows()
        )));
    }

    let bytes = ds.write_with(&full).map_err(|e| CliError::input(&files.data, e))?;
    match &files.out {
        Some(p) => write_file(p, &bytes)?,
        None => out.write_all(&bytes).map_err(io)?,
    }
    if let Some(p) = &files.report {
        let mut json = serde_json::to_string_pretty(&output.provenance_records(&names)).expect("records serialize");
        json.push('\n');
        write_file(p, json.as_bytes())?;
    }
    if let (true, Some(p)) = (files.jacobian, &files.out) {
        let jac: Vec<(usize, &[f64])> = output
            .results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().and_then(|r| r.jacobian.as_deref()).map(|j| (i, j)))
            .collect();
        let mut jp = p.clone().into_os_string();
        jp.push(".jacobian.csv");
        write_file(Path::new(&jp), &jacobian_csv(&names, &jac))?;
    }
    let snapped = output.count(Provenance::is_snapped);
    let _ = writeln!(
        err,
        "refined {} rows: {} values snapped, {} rows skipped, self-check CVR 0",
        rows.len() - output.skipped.len(),
        snapped,
        output.skipped.len()
    );
    Ok(EXIT_OK)
}

pub fn cmd_order(
    data: &Path,
    reference: Option<&Path>,
    constraints: Option<&Path>,
    out_path: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let ds = load_dataset(data)?;
    let names = match constraints {
        Some(p) => load_set(p, None, cfg)?.0.names().to_vec(),
        None => ds.header().to_vec(),
    };
    let o = resolve_ordering(&names, &OrderingData { data: Some((&ds, data)), reference }, cfg)?;
    let text = format_ordering_file(&o, &names);
    match out_path {
        Some(p) => write_file(p, text.as_bytes())?,
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    if let Some(scores) = &o.scores {
        for &v in &o.order {
            log::info!("{}: {}", names[v], scores[v]);
        }
    }
    Ok(EXIT_OK)
}
