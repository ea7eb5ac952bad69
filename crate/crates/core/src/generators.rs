//! Instance generators: named constructions with known exact answers, plus
//! seeded random instances for property suites.
//!
//! Everything here is deterministic given its seed. Random draws go through
//! ChaCha8 streams keyed by [`seed::derive`], and probabilities are built
//! from positive uniforms (`1 - u` with `u ~ [0, 1)`) so no factor entry is
//! ever an accidental zero unless the construction wants one.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bayes::{pd_class_certificate, solve_bayes, BayesError};
use crate::distribution::{FactoredDistribution, ValidationError};
use crate::seed;
use crate::specfile::LoadError;
use crate::support::Support;
use crate::tol;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("sizes out of range: {what}")]
    BadSizes { what: String },
    #[error("parameter {name} = {value} outside {range}")]
    BadParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error(
        "no ({gamma}, {epsilon}) member exists for these sizes: \
         the largest attainable disagreement is {max_epsilon:.6}"
    )]
    Infeasible {
        gamma: f64,
        epsilon: f64,
        max_epsilon: f64,
    },
    #[error("could not certify a ({gamma}, {epsilon}) member within {attempts} attempts")]
    RetriesExhausted {
        gamma: f64,
        epsilon: f64,
        attempts: u32,
    },
    #[error("metadata symbol index {index} out of range ({len} symbols)")]
    BadSymbolIndex { index: usize, len: usize },
    #[error("split weights must be nonnegative and sum to 1, got sum {sum}")]
    BadSplit { sum: f64 },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error(transparent)]
    Load(#[from] LoadError),
}

impl From<crate::support::SupportError> for GeneratorError {
    fn from(e: crate::support::SupportError) -> Self {
        GeneratorError::Validation(e.into())
    }
}

fn positive_uniform(rng: &mut ChaCha8Rng) -> f64 {
    // gen::<f64>() is in [0, 1); flip it so zero is excluded instead of one.
    1.0 - rng.gen::<f64>()
}

fn normalized_positive(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| positive_uniform(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn integer_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64).collect()
}

/// Axis sizes for random instances.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RandomSizes {
    pub x_count: usize,
    pub y_count: usize,
    pub m_count: usize,
    pub d_count: usize,
}

impl RandomSizes {
    fn check(&self, caps: (usize, usize, usize, usize)) -> Result<(), GeneratorError> {
        let (cx, cy, cm, cd) = caps;
        let ok = (1..=cx).contains(&self.x_count)
            && (2..=cy).contains(&self.y_count)
            && (1..=cm).contains(&self.m_count)
            && (1..=cd).contains(&self.d_count);
        if ok {
            Ok(())
        } else {
            Err(GeneratorError::BadSizes {
                what: format!(
                    "got |X|={}, K={}, |M|={}, |D|={}; need 1..={cx}, 2..={cy}, 1..={cm}, 1..={cd}",
                    self.x_count, self.y_count, self.m_count, self.d_count
                ),
            })
        }
    }
}

/// Fully random factored instance: every factor row is a normalized vector
/// of positive uniforms. Property-test fuel, nothing more.
pub fn make_random(sizes: RandomSizes, seed: u64) -> Result<FactoredDistribution, GeneratorError> {
    sizes.check((8, 4, 4, 6))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_d = normalized_positive(&mut rng, sizes.d_count);
    let p_m_given_d = (0..sizes.d_count)
        .map(|_| normalized_positive(&mut rng, sizes.m_count))
        .collect();
    let p_xy_given_d = (0..sizes.d_count)
        .map(|_| normalized_positive(&mut rng, sizes.x_count * sizes.y_count))
        .collect();
    let support = Support::new(
        integer_grid(sizes.x_count),
        sizes.y_count,
        numbered("m", sizes.m_count),
        numbered("d", sizes.d_count),
    )?;
    Ok(FactoredDistribution::new(
        support,
        p_d,
        p_m_given_d,
        p_xy_given_d,
    )?)
}

/// Covariate-shift instance: domains share one conditional label law
/// `eta(y | x)` and differ only in their feature weights `q_d(x)` (and in
/// how they emit metadata). The metadata-informed optimum then ignores
/// metadata, so pooling is exactly as good.
pub fn make_covariate_shift(
    sizes: RandomSizes,
    seed: u64,
) -> Result<FactoredDistribution, GeneratorError> {
    sizes.check((512, 16, 64, 64))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_d = normalized_positive(&mut rng, sizes.d_count);
    let p_m_given_d: Vec<Vec<f64>> = (0..sizes.d_count)
        .map(|_| normalized_positive(&mut rng, sizes.m_count))
        .collect();
    let eta: Vec<Vec<f64>> = (0..sizes.x_count)
        .map(|_| normalized_positive(&mut rng, sizes.y_count))
        .collect();
    let mut p_xy_given_d = Vec::with_capacity(sizes.d_count);
    for _ in 0..sizes.d_count {
        let q = normalized_positive(&mut rng, sizes.x_count);
        let mut table = Vec::with_capacity(sizes.x_count * sizes.y_count);
        for x in 0..sizes.x_count {
            for &e in &eta[x] {
                table.push(q[x] * e);
            }
        }
        p_xy_given_d.push(table);
    }
    let support = Support::new(
        integer_grid(sizes.x_count),
        sizes.y_count,
        numbered("m", sizes.m_count),
        numbered("d", sizes.d_count),
    )?;
    Ok(FactoredDistribution::new(
        support,
        p_d,
        p_m_given_d,
        p_xy_given_d,
    )?)
}

/// Axis sizes for margin-class members; metadata always reveals the domain
/// (`M = D`, identity emission), which is what makes the target
/// disagreement level reachable by construction.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PdSizes {
    pub x_count: usize,
    pub y_count: usize,
    pub domain_count: usize,
}

const PD_MEMBER_ATTEMPTS: u32 = 64;

/// Builds an instance certified to lie in the margin/disagreement class
/// `(gamma, epsilon)`: every positive-mass `(x, m)` posterior margin is at
/// least `gamma` and the metadata disagreement measure is at least
/// `epsilon`.
///
/// Construction: uniform domains, shared feature marginal, and per feature
/// point either one agreed class or an even split of the domains over
/// distinct classes. The split probability starts near `epsilon` scaled by
/// the per-site disagreement yield and escalates until the certificate
/// passes; with the split probability at 1 the target is met by
/// feasibility, so the retry loop terminates. Never returns an uncertified
/// instance.
pub fn make_pd_member(
    gamma: f64,
    epsilon: f64,
    sizes: PdSizes,
    master_seed: u64,
) -> Result<FactoredDistribution, GeneratorError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(GeneratorError::BadParameter {
            name: "gamma",
            value: gamma,
            range: "(0, 1]",
        });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(GeneratorError::BadParameter {
            name: "epsilon",
            value: epsilon,
            range: "(0, 1]",
        });
    }
    let (nx, k, nd) = (sizes.x_count, sizes.y_count, sizes.domain_count);
    if !(1..=8).contains(&nx) || !(2..=4).contains(&k) || !(1..=6).contains(&nd) {
        return Err(GeneratorError::BadSizes {
            what: format!("got |X|={nx}, K={k}, |D|={nd}; need 1..=8, 2..=4, 1..=6"),
        });
    }

    // Evenly partition the domains into r = min(K, |D|) groups; a full
    // disagreement site sends each group to its own class, which yields
    // disagreement mass 1 - sum((group/|D|)^2), the most this layout can.
    let r = k.min(nd);
    let base = nd / r;
    let extra = nd % r;
    let mut group_of = Vec::with_capacity(nd);
    for c in 0..r {
        let size = base + usize::from(c < extra);
        group_of.extend(std::iter::repeat_n(c, size));
    }
    let dis_max = 1.0
        - (0..r)
            .map(|c| {
                let share = group_of.iter().filter(|&&g| g == c).count() as f64 / nd as f64;
                share * share
            })
            .sum::<f64>();
    if epsilon > dis_max + tol::STRUCTURAL {
        return Err(GeneratorError::Infeasible {
            gamma,
            epsilon,
            max_epsilon: dis_max,
        });
    }

    let p_d = vec![1.0 / nd as f64; nd];
    let identity: Vec<Vec<f64>> = (0..nd)
        .map(|d| (0..nd).map(|m| f64::from(u8::from(m == d))).collect())
        .collect();

    let mut rho = (epsilon / dis_max * 1.15).min(1.0);
    for attempt in 0..PD_MEMBER_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, u64::from(attempt)));
        let q = normalized_positive(&mut rng, nx);
        let mut tables = vec![vec![0.0; nx * k]; nd];
        let mut classes: Vec<usize> = (0..k).collect();
        for x in 0..nx {
            let disagree = rng.gen::<f64>() < rho;
            let label_of = |d: usize, classes: &[usize], shared: usize| {
                if disagree {
                    classes[group_of[d]]
                } else {
                    shared
                }
            };
            let shared = rng.gen_range(0..k);
            if disagree {
                // Partial Fisher-Yates: the first r entries become the
                // distinct per-group classes.
                for i in 0..r {
                    let j = i + rng.gen_range(0..k - i);
                    classes.swap(i, j);
                }
            }
            // Headroom above the requested margin so f64 round-off in the
            // certificate never decides membership.
            let margin = gamma + (1.0 - gamma) * 0.05 * rng.gen::<f64>();
            let top = q[x] * (1.0 + margin) / 2.0;
            let rest = q[x] * (1.0 - margin) / 2.0 / (k - 1) as f64;
            for (d, table) in tables.iter_mut().enumerate() {
                let label = label_of(d, &classes, shared);
                for y in 0..k {
                    table[x * k + y] = if y == label { top } else { rest };
                }
            }
        }
        let support = Support::new(
            integer_grid(nx),
            k,
            numbered("m", nd),
            numbered("d", nd),
        )?;
        let f = FactoredDistribution::new(support, p_d.clone(), identity.clone(), tables)?;
        let joint = f.joint();
        let solution = solve_bayes(&joint);
        let certificate = pd_class_certificate(&joint, &solution, gamma, epsilon)?;
        if certificate.member {
            return Ok(f);
        }
        rho = (rho * 1.3 + 0.02).min(1.0);
    }
    Err(GeneratorError::RetriesExhausted {
        gamma,
        epsilon,
        attempts: PD_MEMBER_ATTEMPTS,
    })
}

/// Two domains on disjoint feature ranges with a deterministic threshold
/// label rule in each: domain 1 uniform on a grid over [0, 2] with the
/// class boundary at 1, domain 2 uniform over [4, 6] with the boundary at
/// 5. Metadata reveals the domain. Because the ranges are disjoint, all
/// three exact optima are 0; the interest is in restricted classes, where a
/// single shared threshold must sacrifice one domain's boundary.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Example1Config {
    /// Weight of domain 1.
    pub p: f64,
    /// Grid points per unit of feature range; each domain gets
    /// `2 * grid_n + 1` uniformly weighted points.
    pub grid_n: usize,
}

/// Closed-form reference values for the continuous version of the
/// two-range instance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Example1Analytic {
    /// Best single-threshold pooled risk: `min(p, 1 - p) / 2`.
    pub pool_restricted: f64,
    /// Best per-metadata threshold risk: 0 (each domain is separable).
    pub dg_restricted: f64,
    /// Unrestricted optima; 0 because labels are deterministic.
    pub pool_bayes: f64,
    pub dg_bayes: f64,
}

pub const EXAMPLE1_RANGE: (f64, f64) = (0.0, 6.0);

pub fn make_example1(
    config: Example1Config,
) -> Result<(FactoredDistribution, Example1Analytic), GeneratorError> {
    if !(config.p > 0.0 && config.p < 1.0) {
        return Err(GeneratorError::BadParameter {
            name: "p",
            value: config.p,
            range: "(0, 1)",
        });
    }
    if !(2..=4000).contains(&config.grid_n) {
        return Err(GeneratorError::BadSizes {
            what: format!("grid_n = {} outside 2..=4000", config.grid_n),
        });
    }
    let g = config.grid_n;
    let per_domain = 2 * g + 1;
    let weight = 1.0 / per_domain as f64;
    let mut x_values = Vec::with_capacity(2 * per_domain);
    for i in 0..per_domain {
        x_values.push(i as f64 / g as f64);
    }
    for i in 0..per_domain {
        x_values.push(4.0 + i as f64 / g as f64);
    }
    let k = 2;
    let mut table_d1 = vec![0.0; x_values.len() * k];
    let mut table_d2 = vec![0.0; x_values.len() * k];
    for i in 0..per_domain {
        // Points exactly on a boundary take the right-limit label.
        let x1 = x_values[i];
        let label1 = usize::from(x1 >= 1.0);
        table_d1[i * k + label1] = weight;
        let x2 = x_values[per_domain + i];
        let label2 = usize::from(x2 >= 5.0);
        table_d2[(per_domain + i) * k + label2] = weight;
    }
    let support = Support::new(x_values, k, numbered("m", 2), numbered("d", 2))?;
    let f = FactoredDistribution::new(
        support,
        vec![config.p, 1.0 - config.p],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![table_d1, table_d2],
    )?;
    let analytic = Example1Analytic {
        pool_restricted: config.p.min(1.0 - config.p) / 2.0,
        dg_restricted: 0.0,
        pool_bayes: 0.0,
        dg_bayes: 0.0,
    };
    Ok((f, analytic))
}

/// Logistic posterior curve `sigma(steepness * (x - center))`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PosteriorCurve {
    pub center: f64,
    pub steepness: f64,
}

impl PosteriorCurve {
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.steepness * (x - self.center);
        1.0 / (1.0 + (-t).exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure1Scenario {
    /// Both curves cross 1/2 at the same point; the pooled and
    /// metadata-informed optima coincide.
    Agree,
    /// Shifted crossings; the optima conflict between the crossings.
    Disagree,
}

impl Figure1Scenario {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "agree" => Some(Figure1Scenario::Agree),
            "disagree" => Some(Figure1Scenario::Disagree),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Figure1Scenario::Agree => "agree",
            Figure1Scenario::Disagree => "disagree",
        }
    }
}

/// Two-domain smooth-posterior instance on a shared uniform grid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Figure1Config {
    pub scenario: Figure1Scenario,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    /// Per-metadata posterior curves for the class-1 probability.
    pub curves: [PosteriorCurve; 2],
}

impl Figure1Config {
    /// Canonical curve pair for a scenario on the default grid [-3, 3]
    /// with 121 points.
    pub fn for_scenario(scenario: Figure1Scenario) -> Self {
        let curves = match scenario {
            Figure1Scenario::Agree => [
                PosteriorCurve {
                    center: 0.0,
                    steepness: 1.0,
                },
                PosteriorCurve {
                    center: 0.0,
                    steepness: 2.0,
                },
            ],
            Figure1Scenario::Disagree => [
                PosteriorCurve {
                    center: 1.0,
                    steepness: 1.0,
                },
                PosteriorCurve {
                    center: -1.0,
                    steepness: 1.0,
                },
            ],
        };
        Figure1Config {
            scenario,
            x_min: -3.0,
            x_max: 3.0,
            n_points: 121,
            curves,
        }
    }

    pub fn with_grid(mut self, x_min: f64, x_max: f64, n_points: usize) -> Self {
        self.x_min = x_min;
        self.x_max = x_max;
        self.n_points = n_points;
        self
    }
}

/// One grid row of the posterior curves: the two per-metadata class-1
/// probabilities and their equal-weight pooled mixture.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurveRow {
    pub x: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta_pooled: f64,
}

pub struct Figure1Output {
    pub distribution: FactoredDistribution,
    pub curves: Vec<CurveRow>,
}

pub fn make_figure1(config: &Figure1Config) -> Result<Figure1Output, GeneratorError> {
    if !(config.x_min.is_finite() && config.x_max.is_finite() && config.x_min < config.x_max) {
        return Err(GeneratorError::BadParameter {
            name: "x_min/x_max",
            value: config.x_max - config.x_min,
            range: "finite with x_min < x_max",
        });
    }
    if !(2..=4000).contains(&config.n_points) {
        return Err(GeneratorError::BadSizes {
            what: format!("n_points = {} outside 2..=4000", config.n_points),
        });
    }
    let n = config.n_points;
    let span = config.x_max - config.x_min;
    let weight = 1.0 / n as f64;
    let mut x_values = Vec::with_capacity(n);
    let mut curves = Vec::with_capacity(n);
    let mut tables = vec![vec![0.0; n * 2]; 2];
    for i in 0..n {
        let x = config.x_min + span * i as f64 / (n - 1) as f64;
        let eta1 = config.curves[0].eval(x);
        let eta2 = config.curves[1].eval(x);
        x_values.push(x);
        curves.push(CurveRow {
            x,
            eta1,
            eta2,
            eta_pooled: (eta1 + eta2) / 2.0,
        });
        for (table, eta) in tables.iter_mut().zip([eta1, eta2]) {
            table[i * 2] = weight * (1.0 - eta);
            table[i * 2 + 1] = weight * eta;
        }
    }
    let support = Support::new(x_values, 2, numbered("m", 2), numbered("d", 2))?;
    let [table_d1, table_d2] = <[Vec<f64>; 2]>::try_from(tables).expect("two tables");
    let distribution = FactoredDistribution::new(
        support,
        vec![0.5, 0.5],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![table_d1, table_d2],
    )?;
    Ok(Figure1Output {
        distribution,
        curves,
    })
}

/// Splits one metadata symbol into children that inherit the parent's
/// per-domain conditional law: each domain's emission mass for the parent
/// is divided among the children in the given proportions, and the
/// feature/label tables are untouched. Metadata resolution increases, so
/// the metadata-informed risk can only stay equal or improve.
pub fn refine_metadata(
    f: &FactoredDistribution,
    m_index: usize,
    split: &[f64],
) -> Result<FactoredDistribution, GeneratorError> {
    let s = f.support();
    if m_index >= s.m_count() {
        return Err(GeneratorError::BadSymbolIndex {
            index: m_index,
            len: s.m_count(),
        });
    }
    if split.iter().any(|&w| !(w.is_finite() && w >= 0.0)) || split.is_empty() {
        return Err(GeneratorError::BadSplit {
            sum: split.iter().sum(),
        });
    }
    let total: f64 = split.iter().sum();
    if (total - 1.0).abs() > tol::STRUCTURAL {
        return Err(GeneratorError::BadSplit { sum: total });
    }
    let parent = &s.m_values()[m_index];
    let mut m_values = Vec::with_capacity(s.m_count() + split.len() - 1);
    m_values.extend_from_slice(&s.m_values()[..m_index]);
    for j in 1..=split.len() {
        m_values.push(format!("{parent}.{j}"));
    }
    m_values.extend_from_slice(&s.m_values()[m_index + 1..]);

    let mut p_m_given_d = Vec::with_capacity(s.d_count());
    for d in 0..s.d_count() {
        let old = f.p_m_given_d(d);
        let mut row = Vec::with_capacity(m_values.len());
        row.extend_from_slice(&old[..m_index]);
        row.extend(split.iter().map(|w| w * old[m_index]));
        row.extend_from_slice(&old[m_index + 1..]);
        p_m_given_d.push(row);
    }
    let support = Support::new(
        s.x_values().to_vec(),
        s.y_count(),
        m_values,
        s.d_values().to_vec(),
    )?;
    let p_xy = (0..s.d_count()).map(|d| f.p_xy_given_d(d).to_vec()).collect();
    Ok(FactoredDistribution::new(
        support,
        f.p_d().to_vec(),
        p_m_given_d,
        p_xy,
    )?)
}

/// Declarative generator choice, as read from experiment configs and echoed
/// into run manifests.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Random {
        sizes: RandomSizes,
        seed: u64,
    },
    PdMember {
        gamma: f64,
        epsilon: f64,
        sizes: PdSizes,
        seed: u64,
    },
    CovariateShift {
        sizes: RandomSizes,
        seed: u64,
    },
    Example1 {
        p: f64,
        grid_n: usize,
    },
    Figure1 {
        scenario: Figure1Scenario,
        x_min: f64,
        x_max: f64,
        n_points: usize,
    },
    SpecFile {
        path: String,
    },
}

impl GeneratorSpec {
    /// Builds the distribution. Relative spec-file paths resolve against
    /// `base_dir` (normally the config file's directory).
    pub fn instantiate(&self, base_dir: &Path) -> Result<FactoredDistribution, GeneratorError> {
        match self {
            GeneratorSpec::Random { sizes, seed } => make_random(*sizes, *seed),
            GeneratorSpec::PdMember {
                gamma,
                epsilon,
                sizes,
                seed,
            } => make_pd_member(*gamma, *epsilon, *sizes, *seed),
            GeneratorSpec::CovariateShift { sizes, seed } => make_covariate_shift(*sizes, *seed),
            GeneratorSpec::Example1 { p, grid_n } => make_example1(Example1Config {
                p: *p,
                grid_n: *grid_n,
            })
            .map(|(f, _)| f),
            GeneratorSpec::Figure1 {
                scenario,
                x_min,
                x_max,
                n_points,
            } => make_figure1(
                &Figure1Config::for_scenario(*scenario).with_grid(*x_min, *x_max, *n_points),
            )
            .map(|out| out.distribution),
            GeneratorSpec::SpecFile { path } => {
                let resolved = if Path::new(path).is_absolute() {
                    std::path::PathBuf::from(path)
                } else {
                    base_dir.join(path)
                };
                Ok(crate::specfile::load_spec(&resolved)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::risks;

    #[test]
    fn random_is_seed_deterministic() {
        let sizes = RandomSizes {
            x_count: 3,
            y_count: 3,
            m_count: 2,
            d_count: 4,
        };
        let a = make_random(sizes, 99).unwrap();
        let b = make_random(sizes, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, make_random(sizes, 100).unwrap());
    }

    #[test]
    fn random_rejects_oversized_axes() {
        let sizes = RandomSizes {
            x_count: 9,
            y_count: 3,
            m_count: 2,
            d_count: 2,
        };
        assert!(matches!(
            make_random(sizes, 1),
            Err(GeneratorError::BadSizes { .. })
        ));
    }

    #[test]
    fn example1_analytic_record() {
        let (_, analytic) = make_example1(Example1Config { p: 0.7, grid_n: 10 }).unwrap();
        // 1.0 - 0.7 rounds up by one ulp, so compare with slack.
        assert!((analytic.pool_restricted - 0.15).abs() < 1e-15);
        assert_eq!(analytic.dg_restricted, 0.0);
        let (_, analytic) = make_example1(Example1Config { p: 0.5, grid_n: 10 }).unwrap();
        assert_eq!(analytic.pool_restricted, 0.25);
    }

    #[test]
    fn example1_boundary_points_take_right_limit_label() {
        let (f, _) = make_example1(Example1Config { p: 0.7, grid_n: 5 }).unwrap();
        let s = f.support();
        let boundary = s.x_values().iter().position(|&x| x == 1.0).unwrap();
        // Class 1 at x = 1.0 in domain 1.
        assert!(f.p_xy(0, boundary, 1) > 0.0);
        assert_eq!(f.p_xy(0, boundary, 0), 0.0);
    }

    #[test]
    fn example1_exact_optima_are_zero() {
        let (f, _) = make_example1(Example1Config { p: 0.7, grid_n: 8 }).unwrap();
        let j = f.joint();
        let b = solve_bayes(&j);
        let r = risks(&j, &b).unwrap();
        assert_eq!(r.r_pool, 0.0);
        assert_eq!(r.r_dg, 0.0);
        assert_eq!(r.r_full, 0.0);
    }

    #[test]
    fn pd_member_rejects_unattainable_disagreement() {
        // Two domains split 1/2 + 1/2: disagreement tops out at 0.5.
        let sizes = PdSizes {
            x_count: 2,
            y_count: 2,
            domain_count: 2,
        };
        let err = make_pd_member(0.5, 0.7, sizes, 3).unwrap_err();
        assert!(matches!(err, GeneratorError::Infeasible { .. }));
        // A single domain cannot disagree with itself at all.
        let sizes = PdSizes {
            x_count: 2,
            y_count: 2,
            domain_count: 1,
        };
        assert!(matches!(
            make_pd_member(0.5, 0.1, sizes, 3),
            Err(GeneratorError::Infeasible { .. })
        ));
    }

    #[test]
    fn figure1_disagree_pooled_curve_is_half_at_center() {
        let out = make_figure1(&Figure1Config::for_scenario(Figure1Scenario::Disagree)).unwrap();
        let row = out
            .curves
            .iter()
            .find(|row| row.x == 0.0)
            .expect("default grid contains 0");
        assert!((row.eta_pooled - 0.5).abs() <= tol::STRUCTURAL);
    }

    #[test]
    fn refinement_splits_emission_mass() {
        let sizes = RandomSizes {
            x_count: 2,
            y_count: 2,
            m_count: 2,
            d_count: 2,
        };
        let f = make_random(sizes, 5).unwrap();
        let refined = refine_metadata(&f, 0, &[0.25, 0.75]).unwrap();
        assert_eq!(refined.support().m_count(), 3);
        assert_eq!(refined.support().m_values()[0], "m1.1");
        for d in 0..2 {
            let old = f.p_m_given_d(d)[0];
            let new = refined.p_m_given_d(d);
            assert!((new[0] - 0.25 * old).abs() <= tol::SUMMATION);
            assert!((new[1] - 0.75 * old).abs() <= tol::SUMMATION);
            assert_eq!(new[2], f.p_m_given_d(d)[1]);
        }
    }
}
