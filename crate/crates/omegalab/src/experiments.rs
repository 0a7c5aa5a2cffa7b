//! One function per experiment, each turning a config into reports.

use std::fs;
use std::path::Path;

use omegalab_core::enumerate::{complexity_indexed, enumerate_with, EnumerationCache, EnumerationLimits, Extended};
use omegalab_core::lab::{
    energy_expectation, epsilon_of, growth_check, observable_pair, omega_bits, stable_omega_bits, uncertainty_table,
    EpsilonEstimate, GrowthTable, LabError, OmegaBits, Provenance,
};
use omegalab_core::scatter::{
    build_machine, contradiction_report, level_counts, verify_bound, ScatterMachine, ScatterSpec,
};
use omegalab_core::{
    assign_all, builtin, omega_lower_bound, pad_machine, parse_machine, simulator_prefix, universal_machine, BitString,
    Dyadic, PrefixMachine,
};

use crate::cache::CacheStore;
use crate::config::{parse_bits, Experiment, ExperimentConfig, MachineSource, PrefixSource, SpecFile};
use crate::error::{Error, Result};
use crate::parallel::enumerate_parallel;
use crate::report::{emit_report, Report, PROVENANCE};

/// A rendered output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub content: String,
}

pub fn resolve_machine(source: &MachineSource) -> Result<PrefixMachine> {
    match source {
        MachineSource::Builtin(name) if name == "U" => Ok(universal_machine()),
        MachineSource::Builtin(name) => Ok(builtin(name)?),
        MachineSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Ok(parse_machine(&text)?.into())
        }
        MachineSource::Scattered(path) => Ok(build_scattered(path)?.1.machine),
    }
}

fn build_scattered(path: &Path) -> Result<(ScatterSpec, ScatterMachine)> {
    let spec = SpecFile::load(path)?.spec()?;
    let built = build_machine(&spec)?;
    Ok((spec, built))
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    store: Option<CacheStore>,
}

impl Runner<'_> {
    fn machine(&self, source: &MachineSource) -> Result<PrefixMachine> {
        Ok(pad_machine(&resolve_machine(source)?, self.config.pad))
    }

    /// Scattered machines always get a budget that makes them exact.
    fn limits_for(&self, source: &MachineSource) -> Result<EnumerationLimits> {
        let mut limits = self.config.limits();
        if let MachineSource::Scattered(path) = source {
            let spec = SpecFile::load(path)?.spec()?;
            limits.budget = limits.budget.max(spec.enumeration_budget() + self.config.pad as u64);
        }
        Ok(limits)
    }

    fn cache(&self, machine: &PrefixMachine, limits: EnumerationLimits) -> Result<EnumerationCache> {
        let root = BitString::empty();
        match &self.store {
            Some(store) => store.obtain(machine, &root, limits, self.config.threads),
            None => Ok(enumerate_parallel(machine, &root, limits, self.config.threads)),
        }
    }

    fn main_cache(&self) -> Result<(PrefixMachine, EnumerationCache)> {
        let machine = self.machine(&self.config.machine)?;
        let cache = self.cache(&machine, self.limits_for(&self.config.machine)?)?;
        Ok((machine, cache))
    }

    /// Ω bits of `source`: exact when its cache is, else the prefix stable
    /// between half the budget and the full budget.
    fn omega_source(&self, source: &MachineSource, count: usize) -> Result<OmegaBits> {
        let machine = self.machine(source)?;
        let limits = self.limits_for(source)?;
        let full = self.cache(&machine, limits)?;
        if full.exact {
            return Ok(omega_bits(&full, count));
        }
        let half = self.cache(
            &machine,
            EnumerationLimits {
                budget: limits.budget / 2,
                ..limits
            },
        )?;
        Ok(stable_omega_bits(&[half, full], count))
    }

    fn prefix_bits(&self) -> Result<OmegaBits> {
        let count = self.config.s_max;
        match &self.config.prefix {
            PrefixSource::Own => self.omega_source(&self.config.machine, count),
            PrefixSource::Machine(source) => self.omega_source(source, count),
            PrefixSource::Scattered(path) => {
                let x = SpecFile::load(path)?.sequence()?;
                Ok(OmegaBits {
                    bits: x.prefix(count.min(x.len())),
                    provenance: Provenance::Computable,
                })
            }
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<Document>> {
    let runner = Runner {
        config,
        store: config.cache_dir.as_ref().map(CacheStore::new),
    };
    let reports = match &config.experiment {
        Experiment::Enumerate => vec![("enumerate".to_string(), enumerate_report(&runner)?)],
        Experiment::Omega => vec![("omega".to_string(), omega_report(&runner)?)],
        Experiment::Complexity { strings } => vec![("complexity".to_string(), complexity_report(&runner, strings)?)],
        Experiment::Kraft { lengths } => vec![("kraft".to_string(), kraft_report(lengths)?)],
        Experiment::Uncertainty { growth_threshold } => uncertainty_reports(&runner, *growth_threshold)?,
        Experiment::Observables { strings } => vec![("observables".to_string(), observables_report(&runner, strings)?)],
        Experiment::Scattered { spec, epsilon, horizon } => {
            return scattered_documents(&runner, spec, epsilon, *horizon);
        }
    };
    let format = config.format();
    reports
        .into_iter()
        .map(|(name, report)| {
            Ok(Document {
                name: format!("{name}.{}", format.extension()),
                content: emit_report(&report, format)?,
            })
        })
        .collect()
}

fn cache_label(cache: &EnumerationCache) -> &'static str {
    if cache.exact {
        "exact"
    } else {
        "partial"
    }
}

fn enumerate_report(runner: &Runner<'_>) -> Result<Report> {
    let (_, cache) = runner.main_cache()?;
    let mut report = Report::new(
        format!("halting programs of {} at budget {}", cache.machine_name, cache.budget),
        &["program", "length", "output", PROVENANCE],
    );
    for (program, output) in &cache.halted {
        report.push(vec![
            program.to_string(),
            program.len().to_string(),
            output.to_string(),
            cache_label(&cache).into(),
        ]);
    }
    Ok(report)
}

fn omega_report(runner: &Runner<'_>) -> Result<Report> {
    let (_, cache) = runner.main_cache()?;
    let omega = omega_lower_bound(&cache);
    let provenance = if cache.exact { "exact" } else { "lower bound" };
    let mut report = Report::new(
        format!("halting probability of {}", cache.machine_name),
        &["machine", "budget", "omega", "halted", "frontier", PROVENANCE],
    );
    report.push(vec![
        cache.machine_name.clone(),
        cache.budget.to_string(),
        omega.to_string(),
        cache.halted.len().to_string(),
        cache.frontier.len().to_string(),
        provenance.into(),
    ]);
    report.lines.push(format!("{omega} ({provenance})"));
    Ok(report)
}

fn complexity_report(runner: &Runner<'_>, strings: &[String]) -> Result<Report> {
    let (_, cache) = runner.main_cache()?;
    let index = cache.range_index();
    let targets: Vec<BitString> = if strings.is_empty() {
        index.keys().map(|x| (*x).clone()).collect()
    } else {
        strings.iter().map(|s| parse_bits(s)).collect::<Result<_>>()?
    };
    let provenance = if cache.exact { "exact" } else { "upper bound" };
    let mut report = Report::new(
        format!("complexity under {}", cache.machine_name),
        &["x", "H", "nabla", "delta", PROVENANCE],
    );
    for x in targets {
        let record = complexity_indexed(&index, &x, cache.exact);
        report.push(vec![
            x.to_string(),
            record.h.to_string(),
            record.nabla.to_string(),
            record.delta.to_string(),
            provenance.into(),
        ]);
    }
    Ok(report)
}

fn kraft_report(lengths: &[usize]) -> Result<Report> {
    let codewords = assign_all(lengths)?;
    let mut report = Report::new("prefix-free code", &["index", "length", "codeword", PROVENANCE]);
    for (i, (length, word)) in lengths.iter().zip(&codewords).enumerate() {
        report.push(vec![
            i.to_string(),
            length.to_string(),
            word.to_string(),
            "exact".into(),
        ]);
        report.lines.push(word.to_string());
    }
    Ok(report)
}

fn uncertainty_reports(runner: &Runner<'_>, growth: Option<u64>) -> Result<Vec<(String, Report)>> {
    let (_, cache) = runner.main_cache()?;
    let bits = runner.prefix_bits()?;
    let s_max = runner.config.s_max;
    let rows = uncertainty_table(&cache, &bits, 1..=s_max)?;
    let epsilon = match epsilon_of(&rows) {
        EpsilonEstimate::Min { value, .. } => value.to_string(),
        EpsilonEstimate::NoData => "no-data".into(),
    };
    let mut table = Report::new(
        format!("uncertainty products under {}", cache.machine_name),
        &[
            "s",
            "omega_prefix",
            PROVENANCE,
            "delta_s",
            "H",
            "delta_C",
            "product",
            "sigma_x_sq",
            "sigma_y_sq",
            "epsilon_line",
        ],
    );
    for row in &rows {
        let (sx, sy) = match observable_pair(&cache, &row.omega_prefix) {
            Ok(pair) => (pair.sigma_x_sq.to_string(), pair.sigma_y_sq.to_string()),
            Err(LabError::DegenerateDistribution { .. }) => ("degenerate".into(), "degenerate".into()),
            Err(LabError::EmptyLevel { .. }) => ("empty-level".into(), "empty-level".into()),
            Err(e) => return Err(e.into()),
        };
        table.push(vec![
            row.s.to_string(),
            row.omega_prefix.to_string(),
            row.provenance.to_string(),
            row.delta_s.to_string(),
            row.h.to_string(),
            row.delta_c.to_string(),
            row.product.to_string(),
            sx,
            sy,
            epsilon.clone(),
        ]);
    }
    let mut out = vec![("uncertainty".to_string(), table)];
    if let Some(n) = growth {
        let growth = growth_check(&cache, &bits, n, 1..=s_max)?;
        out.push(("growth".to_string(), growth_report(&growth, bits.provenance)));
    }
    Ok(out)
}

fn growth_report(growth: &GrowthTable, provenance: Provenance) -> Report {
    let mut report = Report::new(
        format!("products against N = {} ({})", growth.threshold, GrowthTable::LABEL),
        &["s", "product", "clears", "clears_from", PROVENANCE],
    );
    let from = growth.clears_from.map_or("none".into(), |m| m.to_string());
    for row in &growth.rows {
        report.push(vec![
            row.s.to_string(),
            row.product.to_string(),
            row.clears.to_string(),
            from.clone(),
            provenance.to_string(),
        ]);
    }
    report
}

fn observables_report(runner: &Runner<'_>, strings: &[String]) -> Result<Report> {
    let (_, cache) = runner.main_cache()?;
    let candidates: Vec<BitString> = if strings.is_empty() {
        (1..=runner.config.s_max).flat_map(BitString::all_of_length).collect()
    } else {
        strings.iter().map(|s| parse_bits(s)).collect::<Result<_>>()?
    };
    let explicit = !strings.is_empty();
    let mut report = Report::new(
        format!("observable pairs under {}", cache.machine_name),
        &[
            "s",
            "prefix",
            "p",
            "alpha_sq",
            "beta_sq",
            "sigma_x_sq",
            "sigma_y_sq",
            "delta_s_sq",
            "delta_C_sq",
            "energy_mean_sq",
            "energy_second_moment",
            "identities_hold",
            PROVENANCE,
        ],
    );
    for v in candidates {
        let pair = match observable_pair(&cache, &v) {
            Ok(pair) => pair,
            Err(e) if explicit => return Err(e.into()),
            Err(_) => continue,
        };
        let energy = energy_expectation(&cache, &v)?;
        let ds_sq = pair.delta_s.to_rational().square();
        let dc_sq = omegalab_core::Rational::from_integer(pair.delta_c.clone()).square();
        let holds = pair.sigma_x_sq == ds_sq && pair.sigma_y_sq == dc_sq && energy.variance() == pair.sigma_y_sq;
        report.push(vec![
            pair.s.to_string(),
            v.to_string(),
            pair.p.to_string(),
            pair.alpha_sq.to_string(),
            pair.beta_sq.to_string(),
            pair.sigma_x_sq.to_string(),
            pair.sigma_y_sq.to_string(),
            ds_sq.to_string(),
            dc_sq.to_string(),
            energy.mean_sq.to_string(),
            energy.second_moment.to_string(),
            holds.to_string(),
            cache_label(&cache).into(),
        ]);
    }
    Ok(report)
}

fn scattered_documents(
    runner: &Runner<'_>,
    spec_path: &Path,
    epsilon: &str,
    horizon: Option<usize>,
) -> Result<Vec<Document>> {
    let file = SpecFile::load(spec_path)?;
    let spec = file.spec()?;
    let x = file.sequence()?;
    let epsilon: Dyadic = epsilon
        .parse()
        .map_err(|e| Error::Invalid(format!("bad epsilon {epsilon:?}: {e}")))?;
    let built = build_machine(&spec)?;
    let cache = enumerate_with(
        &built.machine,
        &BitString::empty(),
        EnumerationLimits::new(spec.enumeration_budget()),
    );
    let table = verify_bound(&cache, &spec, &x)?;
    let counts = level_counts(&cache, &spec);
    let lift_bits = simulator_prefix(&built.machine)?.len();
    let report = contradiction_report(&spec, &table, &epsilon, lift_bits, horizon.unwrap_or(spec.k_max()));

    let mut verify = Report::new(
        format!("bound check for {}", spec.name()),
        &[
            "k",
            "F_k",
            "prefix",
            "H",
            "nabla",
            "delta_C",
            "bound",
            "pass",
            "programs",
            "expected_programs",
            PROVENANCE,
        ],
    );
    for (row, count) in table.iter().zip(&counts) {
        verify.push(vec![
            row.k.to_string(),
            row.f_k.to_string(),
            row.prefix.to_string(),
            row.h.to_string(),
            row.nabla.to_string(),
            row.delta_c.to_string(),
            row.bound.to_string(),
            row.pass.to_string(),
            count.to_string(),
            (1u64 << spec.free_bits(row.k)).to_string(),
            cache_label(&cache).into(),
        ]);
    }

    let mut crossing = Report::new(
        format!("randomness line against compression for {}", spec.name()),
        &[
            "k",
            "F_k",
            "lower",
            "upper",
            "measured_upper",
            "crosses",
            "measured_crosses",
            PROVENANCE,
        ],
    );
    for row in &report.rows {
        crossing.push(vec![
            row.k.to_string(),
            row.f_k.to_string(),
            row.lower.to_string(),
            row.upper.to_string(),
            row.measured_upper.as_ref().map_or("-".into(), Extended::to_string),
            row.crosses().to_string(),
            row.measured_crosses().to_string(),
            if row.measured_upper.is_some() {
                "verified"
            } else {
                "closed-form"
            }
            .into(),
        ]);
    }

    let omega = omega_lower_bound(&cache);
    let mut summary = Report::new(
        format!("summary for {}", spec.name()),
        &[
            "omega",
            "expected_omega",
            "lift_bits",
            "epsilon",
            "crossing",
            "measured_crossing",
            "vacuous",
            PROVENANCE,
        ],
    );
    let show = |k: Option<usize>| k.map_or("none within horizon".into(), |k| k.to_string());
    summary.push(vec![
        omega.to_string(),
        (Dyadic::one() - Dyadic::pow2_neg(spec.k_max() as u64)).to_string(),
        lift_bits.to_string(),
        epsilon.to_string(),
        show(report.crossing),
        show(report.measured_crossing),
        report.vacuous.to_string(),
        cache_label(&cache).into(),
    ]);

    let format = runner.config.format.unwrap_or(crate::report::Format::Csv);
    let ext = format.extension();
    Ok(vec![
        Document {
            name: format!("{}.machine", spec.name()),
            content: built.description,
        },
        Document {
            name: format!("verify.{ext}"),
            content: emit_report(&verify, format)?,
        },
        Document {
            name: format!("contradiction.{ext}"),
            content: emit_report(&crossing, format)?,
        },
        Document {
            name: format!("summary.{ext}"),
            content: emit_report(&summary, format)?,
        },
    ])
}

/// Writes documents to `out` (a file for one document, a directory for
/// several) or concatenates them for standard output.
pub fn write_documents(documents: &[Document], out: Option<&Path>) -> Result<Option<String>> {
    match out {
        None => Ok(Some(
            documents
                .iter()
                .map(|d| d.content.as_str())
                .collect::<Vec<_>>()
                .join("\n"),
        )),
        Some(path) if documents.len() == 1 => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(path, &documents[0].content).map_err(|e| Error::io(path, e))?;
            Ok(None)
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            for d in documents {
                let path = dir.join(&d.name);
                fs::write(&path, &d.content).map_err(|e| Error::io(path, e))?;
            }
            Ok(None)
        }
    }
}
