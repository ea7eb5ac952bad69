//! Plain-text experiment and sweep configs. Same surface syntax as the
//! distribution spec files: `#` comments, `[section]` headers, `key =
//! value` lines. Unknown sections and keys are errors so typos do not
//! silently fall back to defaults.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::erm::experiment::{ExperimentConfig, Family};
use crate::erm::histogram::HistogramParams;
use crate::erm::training::SampleSizeRule;
use crate::generators::{Figure1Scenario, GeneratorSpec, PdSizes, RandomSizes};
use crate::textformat::{parse_kv, split_sections, Section};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line} does not belong to any [section]")]
    ContentBeforeHeader { line: usize },
    #[error("unknown section [{name}] at line {line}")]
    UnknownSection { name: String, line: usize },
    #[error("duplicate section [{name}] at line {line}")]
    DuplicateSection { name: String, line: usize },
    #[error("missing required section [{name}]")]
    MissingSection { name: &'static str },
    #[error("[{section}] is missing key '{key}'")]
    MissingKey {
        section: &'static str,
        key: &'static str,
    },
    #[error("[{section}] line {line}: {message}")]
    Malformed {
        section: &'static str,
        line: usize,
        message: String,
    },
}

fn malformed(section: &'static str, line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Malformed {
        section,
        line,
        message: message.into(),
    }
}

/// Key/value view of one section, with duplicate and leftover detection.
struct KeyMap {
    section: &'static str,
    entries: BTreeMap<String, (String, usize)>,
}

impl KeyMap {
    fn new(section: &'static str, raw: &Section) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for line in &raw.lines {
            let (key, value) = parse_kv(&line.text)
                .ok_or_else(|| malformed(section, line.number, "expected 'key = value'"))?;
            if entries
                .insert(key.to_string(), (value.to_string(), line.number))
                .is_some()
            {
                return Err(malformed(
                    section,
                    line.number,
                    format!("duplicate key '{key}'"),
                ));
            }
        }
        Ok(KeyMap { section, entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &'static str) -> Result<(String, usize), ConfigError> {
        self.take(key).ok_or(ConfigError::MissingKey {
            section: self.section,
            key,
        })
    }

    fn req_usize(&mut self, key: &'static str) -> Result<usize, ConfigError> {
        let (value, line) = self.require(key)?;
        value.parse().map_err(|_| {
            malformed(
                self.section,
                line,
                format!("expected a nonnegative integer for '{key}', got '{value}'"),
            )
        })
    }

    fn opt_usize(&mut self, key: &'static str, default: usize) -> Result<usize, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((value, line)) => value.parse().map_err(|_| {
                malformed(
                    self.section,
                    line,
                    format!("expected a nonnegative integer for '{key}', got '{value}'"),
                )
            }),
        }
    }

    fn opt_u64(&mut self, key: &'static str, default: u64) -> Result<u64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((value, line)) => value.parse().map_err(|_| {
                malformed(
                    self.section,
                    line,
                    format!("expected a nonnegative integer for '{key}', got '{value}'"),
                )
            }),
        }
    }

    fn req_f64(&mut self, key: &'static str) -> Result<f64, ConfigError> {
        let (value, line) = self.require(key)?;
        parse_finite(self.section, line, key, &value)
    }

    fn opt_f64(&mut self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            None => Ok(default),
            Some((value, line)) => parse_finite(self.section, line, key, &value),
        }
    }

    /// Errors on any key nobody consumed.
    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (_, line))) => Err(malformed(
                self.section,
                line,
                format!("unknown key '{key}'"),
            )),
        }
    }
}

fn parse_finite(
    section: &'static str,
    line: usize,
    key: &str,
    value: &str,
) -> Result<f64, ConfigError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(malformed(
            section,
            line,
            format!("expected a finite number for '{key}', got '{value}'"),
        )),
    }
}

fn parse_range(
    section: &'static str,
    key: &'static str,
    value: &str,
    line: usize,
) -> Result<(f64, f64), ConfigError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(malformed(
            section,
            line,
            format!("expected '{key} = LO HI', got '{value}'"),
        ));
    }
    let lo = parse_finite(section, line, key, parts[0])?;
    let hi = parse_finite(section, line, key, parts[1])?;
    Ok((lo, hi))
}

fn parse_size_rule(
    section: &'static str,
    value: &str,
    line: usize,
) -> Result<SampleSizeRule, ConfigError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let bad = || {
        malformed(
            section,
            line,
            format!("expected 'constant N' or 'uniform LO HI', got '{value}'"),
        )
    };
    match parts.as_slice() {
        ["constant", n] => Ok(SampleSizeRule::Constant(n.parse().map_err(|_| bad())?)),
        ["uniform", lo, hi] => Ok(SampleSizeRule::UniformRange {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

fn collect_sections(
    text: &str,
    allowed: &[&'static str],
) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut out = BTreeMap::new();
    for section in split_sections(text) {
        if section.name.is_empty() {
            return Err(ConfigError::ContentBeforeHeader {
                line: section.lines[0].number,
            });
        }
        if !allowed.contains(&section.name.as_str()) {
            return Err(ConfigError::UnknownSection {
                name: section.name,
                line: section.header_line,
            });
        }
        let line = section.header_line;
        let name = section.name.clone();
        if out.insert(section.name.clone(), section).is_some() {
            return Err(ConfigError::DuplicateSection { name, line });
        }
    }
    Ok(out)
}

const GENERATOR: &str = "generator";
const EXPERIMENT: &str = "experiment";
const SWEEP: &str = "sweep";

fn parse_generator(raw: &Section) -> Result<GeneratorSpec, ConfigError> {
    let mut keys = KeyMap::new("generator", raw)?;
    let (kind, kind_line) = keys.require("kind")?;
    let spec = match kind.as_str() {
        "random" | "covariate_shift" => {
            let sizes = RandomSizes {
                x_count: keys.req_usize("x_count")?,
                y_count: keys.req_usize("y_count")?,
                m_count: keys.req_usize("m_count")?,
                d_count: keys.req_usize("d_count")?,
            };
            let seed = keys.opt_u64("seed", 0)?;
            if kind == "random" {
                GeneratorSpec::Random { sizes, seed }
            } else {
                GeneratorSpec::CovariateShift { sizes, seed }
            }
        }
        "pd_member" => GeneratorSpec::PdMember {
            gamma: keys.req_f64("gamma")?,
            epsilon: keys.req_f64("epsilon")?,
            sizes: PdSizes {
                x_count: keys.req_usize("x_count")?,
                y_count: keys.req_usize("y_count")?,
                domain_count: keys.req_usize("domain_count")?,
            },
            seed: keys.opt_u64("seed", 0)?,
        },
        "example1" => GeneratorSpec::Example1 {
            p: keys.req_f64("p")?,
            grid_n: keys.opt_usize("grid_n", 200)?,
        },
        "figure1" => {
            let (scenario_text, scenario_line) = keys.require("scenario")?;
            let scenario = Figure1Scenario::parse(&scenario_text).ok_or_else(|| {
                malformed(
                    "generator",
                    scenario_line,
                    format!("unknown scenario '{scenario_text}' (use agree or disagree)"),
                )
            })?;
            GeneratorSpec::Figure1 {
                scenario,
                x_min: keys.opt_f64("x_min", -3.0)?,
                x_max: keys.opt_f64("x_max", 3.0)?,
                n_points: keys.opt_usize("n_points", 121)?,
            }
        }
        "spec_file" => GeneratorSpec::SpecFile {
            path: keys.require("path")?.0,
        },
        _ => {
            return Err(malformed(
                "generator",
                kind_line,
                format!(
                    "unknown kind '{kind}' (use random, pd_member, covariate_shift, \
                     example1, figure1, or spec_file)"
                ),
            ))
        }
    };
    keys.finish()?;
    Ok(spec)
}

/// Parses a `[generator]` + `[experiment]` config into a runnable
/// experiment description.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut sections = collect_sections(text, &[GENERATOR, EXPERIMENT])?;
    let generator = parse_generator(
        sections
            .remove(GENERATOR)
            .as_ref()
            .ok_or(ConfigError::MissingSection { name: GENERATOR })?,
    )?;
    let raw = sections
        .remove(EXPERIMENT)
        .ok_or(ConfigError::MissingSection { name: EXPERIMENT })?;
    let mut keys = KeyMap::new("experiment", &raw)?;
    let (family_text, family_line) = keys.require("family")?;
    let family = Family::parse(&family_text).ok_or_else(|| {
        malformed(
            "experiment",
            family_line,
            format!("unknown family '{family_text}' (use tabular, threshold, or histogram)"),
        )
    })?;
    let histogram = if family == Family::Histogram {
        let bins = keys.req_usize("histogram_k")?;
        let (value, line) = keys.require("histogram_range")?;
        let (lo, hi) = parse_range("experiment", "histogram_range", &value, line)?;
        Some(HistogramParams { bins, lo, hi })
    } else {
        for key in ["histogram_k", "histogram_range"] {
            if let Some((_, line)) = keys.take(key) {
                return Err(malformed(
                    "experiment",
                    line,
                    format!("'{key}' is only used when family = histogram"),
                ));
            }
        }
        None
    };
    let n_domains = keys.req_usize("n_domains")?;
    let (rule_text, rule_line) = keys.require("samples_per_domain")?;
    let size_rule = parse_size_rule("experiment", &rule_text, rule_line)?;
    let trials = keys.req_usize("trials")?;
    let seed = keys.opt_u64("seed", 0)?;
    keys.finish()?;
    Ok(ExperimentConfig {
        generator,
        family,
        histogram,
        n_domains,
        size_rule,
        trials,
        seed,
    })
}

/// Sampling block of an empirical sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepSampling {
    pub n_domains: usize,
    pub size_rule: SampleSizeRule,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub generator: GeneratorSpec,
    pub ks: Vec<usize>,
    pub range: (f64, f64),
    /// Present iff `mode = empirical`.
    pub sampling: Option<SweepSampling>,
}

/// Parses a `[generator]` + `[sweep]` config.
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let mut sections = collect_sections(text, &[GENERATOR, SWEEP])?;
    let generator = parse_generator(
        sections
            .remove(GENERATOR)
            .as_ref()
            .ok_or(ConfigError::MissingSection { name: GENERATOR })?,
    )?;
    let raw = sections
        .remove(SWEEP)
        .ok_or(ConfigError::MissingSection { name: SWEEP })?;
    let mut keys = KeyMap::new("sweep", &raw)?;
    let (ks_text, ks_line) = keys.require("ks")?;
    let ks = ks_text
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            malformed(
                "sweep",
                ks_line,
                format!("expected 'ks = K1 K2 ...' with integers, got '{ks_text}'"),
            )
        })?;
    if ks.is_empty() {
        return Err(malformed("sweep", ks_line, "capacity list is empty"));
    }
    let (range_text, range_line) = keys.require("range")?;
    let range = parse_range("sweep", "range", &range_text, range_line)?;
    let mode = match keys.take("mode") {
        None => "exact".to_string(),
        Some((value, line)) => {
            if value != "exact" && value != "empirical" {
                return Err(malformed(
                    "sweep",
                    line,
                    format!("unknown mode '{value}' (use exact or empirical)"),
                ));
            }
            value
        }
    };
    let sampling = if mode == "empirical" {
        let n_domains = keys.req_usize("n_domains")?;
        let (rule_text, rule_line) = keys.require("samples_per_domain")?;
        let size_rule = parse_size_rule("sweep", &rule_text, rule_line)?;
        let seed = keys.opt_u64("seed", 0)?;
        Some(SweepSampling {
            n_domains,
            size_rule,
            seed,
        })
    } else {
        for key in ["n_domains", "samples_per_domain", "seed"] {
            if let Some((_, line)) = keys.take(key) {
                return Err(malformed(
                    "sweep",
                    line,
                    format!("'{key}' is only used when mode = empirical"),
                ));
            }
        }
        None
    };
    keys.finish()?;
    Ok(SweepConfig {
        generator,
        ks,
        range,
        sampling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PD1_EXPERIMENT: &str = "\
[generator]
kind = spec_file
path = data/pd1.spec

[experiment]
family = tabular
n_domains = 400
samples_per_domain = constant 25
trials = 20
seed = 7
";

    #[test]
    fn experiment_config_round_trip() {
        let cfg = parse_experiment_config(PD1_EXPERIMENT).unwrap();
        assert_eq!(cfg.family, Family::Tabular);
        assert_eq!(cfg.n_domains, 400);
        assert_eq!(cfg.size_rule, SampleSizeRule::Constant(25));
        assert_eq!(cfg.trials, 20);
        assert_eq!(cfg.seed, 7);
        assert!(matches!(cfg.generator, GeneratorSpec::SpecFile { ref path } if path == "data/pd1.spec"));
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let text = PD1_EXPERIMENT.replace("seed = 7", "sede = 7");
        let err = parse_experiment_config(&text).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("unknown key 'sede'"), "{message}");
        assert!(message.contains("[experiment]"), "{message}");
    }

    #[test]
    fn histogram_keys_need_histogram_family() {
        let text = PD1_EXPERIMENT.replace("family = tabular", "family = tabular\nhistogram_k = 4");
        let err = parse_experiment_config(&text).unwrap_err();
        assert!(err.to_string().contains("only used when family = histogram"));
    }

    #[test]
    fn sweep_config_with_sampling() {
        let text = "\
[generator]
kind = example1
p = 0.7
grid_n = 50

[sweep]
ks = 1 2 4 8
range = 0 6
mode = empirical
n_domains = 100
samples_per_domain = uniform 5 10
";
        let cfg = parse_sweep_config(text).unwrap();
        assert_eq!(cfg.ks, vec![1, 2, 4, 8]);
        assert_eq!(cfg.range, (0.0, 6.0));
        let sampling = cfg.sampling.unwrap();
        assert_eq!(sampling.n_domains, 100);
        assert_eq!(sampling.seed, 0);
        assert_eq!(sampling.size_rule, SampleSizeRule::UniformRange { lo: 5, hi: 10 });
    }

    #[test]
    fn exact_sweep_rejects_sampling_keys() {
        let text = "\
[generator]
kind = example1
p = 0.7

[sweep]
ks = 1 2
range = 0 6
n_domains = 10
";
        let err = parse_sweep_config(text).unwrap_err();
        assert!(err.to_string().contains("only used when mode = empirical"));
    }

    #[test]
    fn missing_section_and_duplicate_section() {
        assert!(matches!(
            parse_experiment_config("[generator]\nkind = example1\np = 0.5\n"),
            Err(ConfigError::MissingSection { name: "experiment" })
        ));
        let text = format!("{PD1_EXPERIMENT}\n[experiment]\n");
        assert!(matches!(
            parse_experiment_config(&text),
            Err(ConfigError::DuplicateSection { .. })
        ));
    }
}
