//! The law suite: every checkable statement bound to a bounded, replayable
//! run. Exhaustive laws cover their whole domain within the stated bounds;
//! sampled laws run on a seeded corpus of random finite modules. A verdict
//! only ever claims the covered domain.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::gf2::Gf2Vector;
use crate::modules::{
    make_finite, FiniteUnstableAlgebra, FiniteUnstableModule, ModuleDescription, ModuleElement, ModuleError,
    StructuredModule,
};
use crate::nilfilt::{
    filtration_layer, filtration_table, nilpotence_degree, replay_certificate, rs_layer, rs_layer_with_image,
    sq0_saturate, sq_lower_kernel, strong_f_iso, strong_f_iso_truncated, unbounded, FIsoVerdict, NilError,
    NilpotenceCertificate, Submodule,
};
use crate::oracle::{sums_agree, word_agrees_with};
use crate::steenrod::{
    basis_dim, conjugate, evaluate_witness, full_basis, ideal_membership, multiply, normalize_word,
    square_relation_by_conjugation, square_relation_from_witness, AdmissibleMonomial, AdmissibleSum,
    SteenrodError,
};
use crate::tor::{bar_tor, check_corner, column_nilpotence, TorError};

#[derive(Debug, Error)]
pub enum LawError {
    #[error("unknown law id `{0}`")]
    UnknownId(String),
    #[error("law `{id}` has no instance n = {n}")]
    NoInstance { id: String, n: usize },
    #[error("law `{id}` is indexed by n = {lo}..={hi}; pass one")]
    MissingInstance { id: String, lo: usize, hi: usize },
    #[error(transparent)]
    Steenrod(#[from] SteenrodError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Nil(#[from] NilError),
    #[error(transparent)]
    Tor(#[from] TorError),
    #[error("certificate does not replay: {0}")]
    Replay(String),
}

/// Bounds shared by the suite. Every law echoes the ones it used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawParams {
    pub seed: u64,
    /// Restricts n-indexed laws to one instance.
    pub n: Option<usize>,
    /// Corpus size for sampled laws.
    pub samples: usize,
    pub max_top: usize,
    pub max_dim: usize,
    pub c_max: usize,
}

impl Default for LawParams {
    fn default() -> Self {
        Self {
            seed: 7,
            n: None,
            samples: 200,
            max_top: 10,
            max_dim: 3,
            c_max: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Exhaustive,
    Sampled,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Exhaustive => "exhaustive",
            Domain::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Holds on the covered domain; `witness` is supporting data such as a
    /// membership witness.
    Verified { coverage: String, witness: Option<String> },
    Refuted { witness: String },
    Undetermined { budget: String },
    /// The engine raised an error; never a statement about the law.
    Failed { error: String },
}

impl Verdict {
    fn kind(&self) -> &'static str {
        match self {
            Verdict::Verified { .. } => "verified",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Undetermined { .. } => "undetermined",
            Verdict::Failed { .. } => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LawReport {
    pub id: String,
    pub n: Option<usize>,
    pub statement: String,
    pub domain: Domain,
    pub params: Vec<(String, String)>,
    pub verdict: Verdict,
    pub expected_refutation: bool,
    pub elapsed: Duration,
}

impl LawReport {
    pub fn name(&self) -> String {
        match self.n {
            Some(n) => format!("{}[n={n}]", self.id),
            None => self.id.clone(),
        }
    }

    /// An unexpected refutation, an engine failure, or an expected
    /// refutation that did not happen.
    pub fn is_failure(&self) -> bool {
        match &self.verdict {
            Verdict::Refuted { .. } => !self.expected_refutation,
            Verdict::Failed { .. } => true,
            Verdict::Verified { .. } => self.expected_refutation,
            Verdict::Undetermined { .. } => false,
        }
    }

    pub fn is_unexpected_refutation(&self) -> bool {
        matches!(self.verdict, Verdict::Refuted { .. }) && !self.expected_refutation
    }

    /// One line: name, verdict, domain, detail.
    pub fn line(&self, timing: bool) -> String {
        let mut verdict = self.verdict.kind().to_string();
        if self.expected_refutation {
            verdict.push_str(if matches!(self.verdict, Verdict::Refuted { .. }) {
                " (expected)"
            } else {
                " (refutation expected)"
            });
        }
        let detail = match &self.verdict {
            Verdict::Verified { coverage, witness } => match witness {
                Some(w) => format!("{coverage}; witness: {w}"),
                None => coverage.clone(),
            },
            Verdict::Refuted { witness } => format!("witness: {witness}"),
            Verdict::Undetermined { budget } => format!("budget: {budget}"),
            Verdict::Failed { error } => format!("error: {error}"),
        };
        let mut out = format!("{:<28} {:<24} {:<10} {detail}", self.name(), verdict, self.domain.to_string());
        if timing {
            out.push_str(&format!(" [{:.1} ms]", self.elapsed.as_secs_f64() * 1e3));
        }
        out
    }

    pub fn to_json(&self, timing: bool) -> Value {
        let params: serde_json::Map<String, Value> =
            self.params.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let mut verdict = json!({ "kind": self.verdict.kind() });
        match &self.verdict {
            Verdict::Verified { coverage, witness } => {
                verdict["coverage"] = json!(coverage);
                if let Some(w) = witness {
                    verdict["witness"] = json!(w);
                }
            }
            Verdict::Refuted { witness } => verdict["witness"] = json!(witness),
            Verdict::Undetermined { budget } => verdict["budget"] = json!(budget),
            Verdict::Failed { error } => verdict["error"] = json!(error),
        }
        let mut out = json!({
            "id": self.id,
            "n": self.n,
            "statement": self.statement,
            "domain": self.domain.to_string(),
            "params": params,
            "verdict": verdict,
            "expected_refutation": self.expected_refutation,
            "failure": self.is_failure(),
        });
        if timing {
            out["elapsed_ms"] = json!(self.elapsed.as_secs_f64() * 1e3);
        }
        out
    }
}

/// The whole suite as one JSON document.
pub fn suite_json(params: &LawParams, reports: &[LawReport], timing: bool) -> Value {
    let count = |k: &str| reports.iter().filter(|r| r.verdict.kind() == k).count();
    json!({
        "seed": params.seed,
        "samples": params.samples,
        "max_top": params.max_top,
        "max_dim": params.max_dim,
        "c_max": params.c_max,
        "laws": reports.iter().map(|r| r.to_json(timing)).collect::<Vec<_>>(),
        "summary": {
            "verified": count("verified"),
            "refuted": count("refuted"),
            "undetermined": count("undetermined"),
            "failed": count("failed"),
            "failures": reports.iter().filter(|r| r.is_failure()).count(),
        },
    })
}

type LawFn = fn(&mut Run) -> Result<Verdict, LawError>;

pub struct LawSpec {
    pub id: &'static str,
    pub statement: &'static str,
    pub domain: Domain,
    /// Instances `n` for indexed laws.
    pub instances: Option<(usize, usize)>,
    pub expected_refutation: fn(Option<usize>) -> bool,
    run: LawFn,
}

fn never(_: Option<usize>) -> bool {
    false
}

fn always(_: Option<usize>) -> bool {
    true
}

pub static REGISTRY: &[LawSpec] = &[
    LawSpec {
        id: "adem_oracle",
        statement: "adem_normalize(Sq^a Sq^b) acts like Sq^a Sq^b on F2[u_1..u_{a+b}]",
        domain: Domain::Exhaustive,
        instances: None,
        expected_refutation: never,
        run: adem_oracle,
    },
    LawSpec {
        id: "conjugation",
        statement: "chi(chi(x)) = x and chi(xy) = chi(y) chi(x) on the admissible basis",
        domain: Domain::Exhaustive,
        instances: None,
        expected_refutation: never,
        run: conjugation,
    },
    LawSpec {
        id: "lemma_5_7",
        statement: "Sq^{2^n} Sq^{2^n} lies in Abar(n-1) Sq^{2^n} Abar(n-1)",
        domain: Domain::Exhaustive,
        instances: Some((1, 4)),
        expected_refutation: never,
        run: lemma_5_7,
    },
    LawSpec {
        id: "cartan_serre_leading",
        statement: "admissibles of degree 2^{n+1} and length >= 2 begin with an index > 2^n",
        domain: Domain::Exhaustive,
        instances: Some((1, 5)),
        expected_refutation: never,
        run: cartan_serre_leading,
    },
    LawSpec {
        id: "chi_top_absent",
        statement: "Sq^{2^{n+1}} does not occur in chi(Sq^{2^n} Sq^{2^n})",
        domain: Domain::Exhaustive,
        instances: Some((1, 5)),
        expected_refutation: never,
        run: chi_top_absent,
    },
    LawSpec {
        id: "square_decomposition",
        statement: "Sq^{2^n} Sq^{2^n} = sum a_j b_j with 2^n < |b_j| < 2^{n+1}, by both routes",
        domain: Domain::Exhaustive,
        instances: Some((1, 4)),
        expected_refutation: never,
        run: square_decomposition,
    },
    LawSpec {
        id: "adem_display_5",
        statement: "Sq^{2^n} Sq^{2^n} = sum_{t=1}^{n-1} Sq^{2^{n+1}-2^t} Sq^{2^t} (displayed form)",
        domain: Domain::Exhaustive,
        instances: Some((1, 4)),
        expected_refutation: always,
        run: adem_display_5,
    },
    LawSpec {
        id: "lemma_6_2",
        statement: "the common kernel of Sq_0..Sq_h is a submodule",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: lemma_6_2,
    },
    LawSpec {
        id: "prop_2_4",
        statement: "for finite M, M_s is the span of degrees >= s",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: prop_2_4,
    },
    LawSpec {
        id: "cor_2_5",
        statement: "R_s(K x F(1)) = K x F(1) and R_t = 0 for t != s, K concentrated in degree s",
        domain: Domain::Exhaustive,
        instances: None,
        expected_refutation: never,
        run: cor_2_5,
    },
    LawSpec {
        id: "support_u1",
        statement: "layers R_s(K x F(1)) are supported in degrees 2^h",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: support_u1,
    },
    LawSpec {
        id: "support_u2",
        statement: "tensor squares of such layers are supported in degrees 2^h and 2^h + 2^j",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: support_u2,
    },
    LawSpec {
        id: "prop_1_8",
        statement: "0 -> K -> M -> N -> 0 with K in Nil_k gives R_s(M) = R_s(N) for s < k",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: prop_1_8,
    },
    LawSpec {
        id: "prop_1_9",
        statement: "N in Nil_d, M/N in Nil_{2d}: R_s(N) -> R_s(M) is a strong F-isomorphism for d <= s < 2d",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: prop_1_9,
    },
    LawSpec {
        id: "susp_formula",
        statement: "Sigma^s(Sq_k x) = Sq_{k+s}(Sigma^s x), and certificates shift by s",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: susp_formula,
    },
    LawSpec {
        id: "tensor_nil",
        statement: "x at least u-nilpotent, y at least v-nilpotent: x (x) y at least (u+v)-nilpotent",
        domain: Domain::Sampled,
        instances: None,
        expected_refutation: never,
        run: tensor_nil,
    },
    LawSpec {
        id: "lemma_1_12",
        statement: "H reduced, J <= H: some H' <= H is F-isomorphic to H and x in H', Sq_0 x in J imply x in J",
        domain: Domain::Exhaustive,
        instances: None,
        expected_refutation: never,
        run: lemma_1_12,
    },
    LawSpec {
        id: "tor_corner",
        statement: "Tor^{-1} = Q(A) as unstable modules; d^2 = 0; connectivity bound",
        domain: Domain::Exhaustive,
        instances: None,
        expected_refutation: never,
        run: tor_corner,
    },
    LawSpec {
        id: "tor_exterior",
        statement: "Tor over Lambda(x_3) has dim Tor^{-s,t} = [t = 3s]",
        domain: Domain::Exhaustive,
        instances: None,
        expected_refutation: never,
        run: tor_exterior,
    },
    LawSpec {
        id: "tor_columns",
        statement: "column s of Tor is in Nil_{sd} when Abar is in Nil_d",
        domain: Domain::Exhaustive,
        instances: None,
        expected_refutation: never,
        run: tor_columns,
    },
];

pub fn law_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|l| l.id).collect()
}

fn find(id: &str) -> Result<&'static LawSpec, LawError> {
    REGISTRY
        .iter()
        .find(|l| l.id == id)
        .ok_or_else(|| LawError::UnknownId(id.to_string()))
}

/// State of one law run: the parameters in force and those it reports.
pub struct Run<'a> {
    pub params: &'a LawParams,
    pub n: Option<usize>,
    recorded: Vec<(String, String)>,
}

impl Run<'_> {
    fn param(&mut self, key: &str, value: impl fmt::Display) {
        self.recorded.push((key.to_string(), value.to_string()));
    }

    fn seeded(&mut self) {
        self.param("seed", self.params.seed);
        self.param("samples", self.params.samples);
        self.param("max_top", self.params.max_top);
        self.param("max_dim", self.params.max_dim);
    }

    fn corpus(&mut self) -> Vec<FiniteUnstableModule> {
        self.seeded();
        module_corpus(self.params.seed, self.params.samples, self.params.max_top, self.params.max_dim)
    }

    fn n(&self) -> usize {
        self.n.expect("indexed law")
    }
}

/// Runs one law; `n` is required exactly for indexed laws.
pub fn run_law(id: &str, n: Option<usize>, params: &LawParams) -> Result<LawReport, LawError> {
    let spec = find(id)?;
    match (spec.instances, n) {
        (Some((lo, hi)), Some(k)) if (lo..=hi).contains(&k) => {}
        (None, None) => {}
        (_, Some(k)) => return Err(LawError::NoInstance { id: id.into(), n: k }),
        (Some((lo, hi)), None) => return Err(LawError::MissingInstance { id: id.into(), lo, hi }),
    }
    let mut run = Run {
        params,
        n,
        recorded: Vec::new(),
    };
    let start = Instant::now();
    let verdict = (spec.run)(&mut run).unwrap_or_else(|e| Verdict::Failed { error: e.to_string() });
    Ok(LawReport {
        id: spec.id.to_string(),
        n,
        statement: spec.statement.to_string(),
        domain: spec.domain,
        params: run.recorded,
        verdict,
        expected_refutation: (spec.expected_refutation)(n),
        elapsed: start.elapsed(),
    })
}

/// Runs the selected laws (all when `only` is empty), each instance as its
/// own report, concurrently; reports come back sorted by id, then `n`.
pub fn run_suite(only: &[String], params: &LawParams) -> Result<Vec<LawReport>, LawError> {
    let specs: Vec<&LawSpec> = if only.is_empty() {
        REGISTRY.iter().collect()
    } else {
        only.iter().map(|id| find(id)).collect::<Result<_, _>>()?
    };
    let mut jobs: Vec<(&'static str, Option<usize>)> = Vec::new();
    for spec in specs {
        match spec.instances {
            None => jobs.push((spec.id, None)),
            Some((lo, hi)) => match params.n {
                Some(n) if (lo..=hi).contains(&n) => jobs.push((spec.id, Some(n))),
                Some(_) => {}
                None => jobs.extend((lo..=hi).map(|n| (spec.id, Some(n)))),
            },
        }
    }
    jobs.sort();
    jobs.dedup();
    jobs.par_iter()
        .map(|&(id, n)| run_law(id, n, params))
        .collect()
}

// ---------------------------------------------------------------------------
// random corpus

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Gf2Vector {
    loop {
        let bits: Vec<u8> = (0..dim).map(|_| rng.gen_range(0..=1)).collect();
        let v = Gf2Vector::from_bits(&bits);
        if !v.is_zero() {
            return v;
        }
    }
}

fn random_summand(rng: &mut ChaCha8Rng, max_top: usize) -> FiniteUnstableModule {
    let shift = rng.gen_range(0..=2.min(max_top));
    let top = rng.gen_range(shift.max(1)..=max_top) - shift;
    let base = match rng.gen_range(0..5) {
        0 => StructuredModule::free(rng.gen_range(1..=4), top).truncate(top),
        1 => StructuredModule::RpInfinity.truncate(top),
        2 => Ok(FiniteUnstableModule::sphere(rng.gen_range(0..=top))),
        3 => Ok(FiniteUnstableModule::trivial_action(
            "T",
            (0..=top).map(|_| rng.gen_range(0..=2)).collect(),
        )),
        _ => StructuredModule::free(1, top)
            .tensor(StructuredModule::free(1, top))
            .truncate(top),
    }
    .expect("truncations within the bound are valid");
    if shift > 0 {
        base.suspend(shift)
    } else {
        base
    }
}

fn kill(m: &FiniteUnstableModule, degree: usize, v: Gf2Vector) -> FiniteUnstableModule {
    let sub = m.generated_submodule(&BTreeMap::from([(degree, vec![v])]));
    m.quotient(&sub).expect("quotient by a generated submodule")
}

/// `count` valid finite unstable modules with top degree at most `max_top`
/// and every degree of dimension at most `max_dim`: direct sums of truncated
/// free modules, truncated `RP^inf`, spheres, trivial modules and
/// `F(1) x F(1)`, possibly suspended, cut down by random cyclic submodules.
pub fn module_corpus(seed: u64, count: usize, max_top: usize, max_dim: usize) -> Vec<FiniteUnstableModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let parts = rng.gen_range(1..=3);
            let mut m = random_summand(&mut rng, max_top);
            for _ in 1..parts {
                m = m.direct_sum(&random_summand(&mut rng, max_top));
            }
            for _ in 0..rng.gen_range(0..=2) {
                let nonzero: Vec<usize> = (0..=m.top_degree()).filter(|&d| m.dim(d) > 0).collect();
                if nonzero.is_empty() {
                    break;
                }
                let d = nonzero[rng.gen_range(0..nonzero.len())];
                let v = random_vector(&mut rng, m.dim(d));
                m = kill(&m, d, v);
            }
            while let Some(d) = (0..=m.top_degree()).find(|&d| m.dim(d) > max_dim) {
                let v = random_vector(&mut rng, m.dim(d));
                m = kill(&m, d, v);
            }
            m.with_name(&format!("sample{i}"))
        })
        .collect()
}

fn basis_elements(m: &FiniteUnstableModule) -> Vec<ModuleElement> {
    (0..=m.top_degree())
        .flat_map(|d| (0..m.dim(d)).map(move |j| ModuleElement::basis(d, m.dim(d), j)))
        .collect()
}

fn degrees_at_least(m: &FiniteUnstableModule, k: usize) -> BTreeMap<usize, Vec<Gf2Vector>> {
    (k..=m.top_degree())
        .map(|d| (d, (0..m.dim(d)).map(|j| Gf2Vector::unit(m.dim(d), j)).collect()))
        .collect()
}

fn rp2() -> FiniteUnstableModule {
    make_finite(&ModuleDescription {
        name: "RP2".into(),
        dims: vec![0, 1, 1],
        ops: BTreeMap::from([(1, BTreeMap::from([(1, crate::gf2::Gf2Matrix::identity(1))]))]),
        labels: BTreeMap::new(),
    })
    .expect("RP2 is unstable")
}

fn concentrated(s: usize, dim: usize) -> FiniteUnstableModule {
    let mut dims = vec![0; s + 1];
    dims[s] = dim;
    FiniteUnstableModule::trivial_action(&format!("K{dim}[{s}]"), dims)
}

fn pairs_label(pairs: &[(AdmissibleSum, AdmissibleSum)]) -> String {
    if pairs.is_empty() {
        return "0".into();
    }
    pairs.iter().map(|(a, b)| format!("({a}, {b})")).collect::<Vec<_>>().join(" + ")
}

fn undetermined(e: &NilError) -> Option<Verdict> {
    match e {
        NilError::Undetermined { degree, reason } => Some(Verdict::Undetermined {
            budget: format!("degree {degree}: {reason}"),
        }),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// algebra laws

fn adem_oracle(run: &mut Run) -> Result<Verdict, LawError> {
    let bound = 24;
    run.param("bound", bound);
    let pairs: Vec<(usize, usize)> = (1..bound)
        .flat_map(|a| (1..=bound - a).map(move |b| (a, b)))
        .collect();
    let bad = pairs
        .par_iter()
        .find_first(|&&(a, b)| !word_agrees_with(&[a, b], &normalize_word(&[a, b])));
    Ok(match bad {
        Some(&(a, b)) => Verdict::Refuted {
            witness: format!("Sq{a} Sq{b} -> {} disagrees under evaluation", normalize_word(&[a, b])),
        },
        None => Verdict::Verified {
            coverage: format!("all {} pairs Sq^a Sq^b with a + b <= {bound}", pairs.len()),
            witness: None,
        },
    })
}

fn conjugation(run: &mut Run) -> Result<Verdict, LawError> {
    let bound = 20;
    run.param("bound", bound);
    let basis: Vec<AdmissibleSum> = (0..=bound)
        .flat_map(full_basis)
        .map(AdmissibleSum::from)
        .collect();
    if let Some(x) = basis.par_iter().find_first(|x| conjugate(&conjugate(x)) != **x) {
        return Ok(Verdict::Refuted {
            witness: format!("chi(chi({x})) = {}", conjugate(&conjugate(x))),
        });
    }
    let pairs: Vec<(&AdmissibleSum, &AdmissibleSum)> = basis
        .iter()
        .flat_map(|x| basis.iter().map(move |y| (x, y)))
        .filter(|(x, y)| x.degree().unwrap_or(0) + y.degree().unwrap_or(0) <= bound)
        .collect();
    let bad = pairs
        .par_iter()
        .find_first(|(x, y)| conjugate(&multiply(x, y)) != multiply(&conjugate(y), &conjugate(x)));
    Ok(match bad {
        Some((x, y)) => Verdict::Refuted {
            witness: format!("x = {x}, y = {y}: chi(xy) != chi(y) chi(x)"),
        },
        None => Verdict::Verified {
            coverage: format!(
                "{} basis monomials and {} ordered pairs of total degree <= {bound}",
                basis.len(),
                pairs.len()
            ),
            witness: None,
        },
    })
}

/// Largest admissible basis the membership solver is allowed to face.
const MEMBERSHIP_BASIS_CAP: usize = 4096;

fn lemma_5_7(run: &mut Run) -> Result<Verdict, LawError> {
    let n = run.n();
    let half = 1usize << n;
    run.param("n", n);
    run.param("basis_cap", MEMBERSHIP_BASIS_CAP);
    let dim = basis_dim(2 * half);
    if dim > MEMBERSHIP_BASIS_CAP {
        return Ok(Verdict::Undetermined {
            budget: format!("degree {} has {dim} admissibles > cap {MEMBERSHIP_BASIS_CAP}", 2 * half),
        });
    }
    let target = normalize_word(&[half, half]);
    Ok(match ideal_membership(&target, n)? {
        None => Verdict::Refuted {
            witness: format!("{target} is outside the span of a Sq{half} b (linear system has no solution)"),
        },
        Some(w) => {
            let replay = evaluate_witness(n, &w);
            if replay != target {
                Verdict::Refuted {
                    witness: format!("witness {} evaluates to {replay}", pairs_label(&w)),
                }
            } else {
                Verdict::Verified {
                    coverage: format!("{target} decided over a basis of {dim} admissibles; witness replayed"),
                    witness: Some(pairs_label(&w)),
                }
            }
        }
    })
}

fn cartan_serre_leading(run: &mut Run) -> Result<Verdict, LawError> {
    let n = run.n();
    run.param("n", n);
    let degree = 2usize << n;
    let basis = full_basis(degree);
    let long: Vec<&AdmissibleMonomial> = basis.iter().filter(|m| m.len() >= 2).collect();
    Ok(match long.iter().find(|m| m.indices()[0] <= 1 << n) {
        Some(m) => Verdict::Refuted { witness: m.to_string() },
        None => Verdict::Verified {
            coverage: format!("{} admissibles of degree {degree} with length >= 2", long.len()),
            witness: None,
        },
    })
}

fn chi_top_absent(run: &mut Run) -> Result<Verdict, LawError> {
    let n = run.n();
    run.param("n", n);
    let half = 1usize << n;
    let chi = conjugate(&normalize_word(&[half, half]));
    let top = AdmissibleMonomial::sq(2 * half);
    Ok(if chi.contains(&top) {
        Verdict::Refuted {
            witness: format!("chi(Sq{half} Sq{half}) = {chi}"),
        }
    } else {
        Verdict::Verified {
            coverage: format!("chi(Sq{half} Sq{half}) has {} terms, none of length one", chi.len()),
            witness: None,
        }
    })
}

fn check_decomposition(n: usize, pairs: &[(AdmissibleSum, AdmissibleSum)]) -> Option<String> {
    let half = 1usize << n;
    let mut total = AdmissibleSum::zero();
    for (a, b) in pairs {
        match b.degree() {
            Some(d) if b.is_homogeneous() && half < d && d < 2 * half => {}
            _ => return Some(format!("b = {b} has degree outside ({half}, {})", 2 * half)),
        }
        total.add_assign(&multiply(a, b));
    }
    let square = normalize_word(&[half, half]);
    (total != square).then(|| format!("{} sums to {total}, not {square}", pairs_label(pairs)))
}

fn square_decomposition(run: &mut Run) -> Result<Verdict, LawError> {
    let n = run.n();
    run.param("n", n);
    let half = 1usize << n;
    let target = normalize_word(&[half, half]);
    let Some(w) = ideal_membership(&target, n)? else {
        return Ok(Verdict::Refuted {
            witness: "no membership witness".into(),
        });
    };
    let from_witness = square_relation_from_witness(n, &w);
    if let Some(bad) = check_decomposition(n, &from_witness) {
        return Ok(Verdict::Refuted {
            witness: format!("membership route: {bad}"),
        });
    }
    let Some(by_chi) = square_relation_by_conjugation(n) else {
        return Ok(Verdict::Refuted {
            witness: format!("chi(Sq{half} Sq{half}) has a term of length one"),
        });
    };
    if let Some(bad) = check_decomposition(n, &by_chi) {
        return Ok(Verdict::Refuted {
            witness: format!("conjugation route: {bad}"),
        });
    }
    Ok(Verdict::Verified {
        coverage: format!(
            "membership route with {} terms, conjugation route with {} terms",
            from_witness.len(),
            by_chi.len()
        ),
        witness: None,
    })
}

fn adem_display_5(run: &mut Run) -> Result<Verdict, LawError> {
    let n = run.n();
    run.param("n", n);
    let half = 1usize << n;
    let mut displayed = AdmissibleSum::zero();
    for t in 1..n {
        displayed.add_monomial(AdmissibleMonomial::new(vec![2 * half - (1 << t), 1 << t])?);
    }
    let actual = normalize_word(&[half, half]);
    if !word_agrees_with(&[half, half], &actual) {
        return Ok(Verdict::Failed {
            error: format!("Adem normal form of Sq{half} Sq{half} fails the oracle"),
        });
    }
    if actual == displayed {
        return Ok(Verdict::Verified {
            coverage: format!("Sq{half} Sq{half} = {actual}"),
            witness: None,
        });
    }
    let difference = actual.sum(&displayed);
    let oracle = if sums_agree(&displayed, &actual, 2 * half) {
        "accepts"
    } else {
        "rejects"
    };
    Ok(Verdict::Refuted {
        witness: format!(
            "Sq{half} Sq{half} = {actual}; displayed sum = {displayed}; difference = {difference}; evaluation oracle {oracle} the displayed sum"
        ),
    })
}

// ---------------------------------------------------------------------------
// filtration laws

fn lemma_6_2(run: &mut Run) -> Result<Verdict, LawError> {
    let corpus = run.corpus();
    let results: Vec<Result<Option<String>, LawError>> = corpus
        .par_iter()
        .enumerate()
        .map(|(idx, m)| {
            for h in 0..=m.top_degree() {
                let k = sq_lower_kernel(m, h)?;
                if let Some(&(i, d, j)) = k.violations.first() {
                    return Ok(Some(format!(
                        "sample {idx}, h = {h}: Sq{i} moves kernel vector {j} of degree {d} out of the kernel"
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    let mut cases = 0;
    for (r, m) in results.into_iter().zip(&corpus) {
        if let Some(w) = r? {
            return Ok(Verdict::Refuted { witness: w });
        }
        cases += m.top_degree() + 1;
    }
    Ok(Verdict::Verified {
        coverage: format!("{} modules, {cases} pairs (module, h) with h <= top degree", corpus.len()),
        witness: None,
    })
}

fn prop_2_4(run: &mut Run) -> Result<Verdict, LawError> {
    let corpus = run.corpus();
    let c_max = run.params.c_max;
    run.param("c_max", c_max);
    let results: Vec<Result<Option<String>, NilError>> = corpus
        .par_iter()
        .enumerate()
        .map(|(idx, m)| {
            let top = m.top_degree();
            let sm = StructuredModule::from(m.clone());
            for s in 0..=top + 1 {
                let layer = filtration_layer(&sm, s, top, c_max)?;
                for d in 0..=top {
                    let expect = if d >= s { m.dim(d) } else { 0 };
                    if layer[&d].len() != expect {
                        return Ok(Some(format!(
                            "sample {idx}: dim M_{s} in degree {d} is {}, expected {expect}",
                            layer[&d].len()
                        )));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    let mut cases = 0;
    for (r, m) in results.into_iter().zip(&corpus) {
        match r {
            Ok(Some(w)) => return Ok(Verdict::Refuted { witness: w }),
            Ok(None) => cases += m.top_degree() + 2,
            Err(e) => return undetermined(&e).ok_or(e.into()),
        }
    }
    Ok(Verdict::Verified {
        coverage: format!("{} modules, {cases} layers M_s for s <= top + 1", corpus.len()),
        witness: None,
    })
}

const SUPPORT_BOUND: usize = 64;

fn cor_2_5(run: &mut Run) -> Result<Verdict, LawError> {
    let c_max = run.params.c_max;
    let (s_top, dim_top, t_top) = (4, 3, 6);
    run.param("degree_bound", SUPPORT_BOUND);
    run.param("s", format!("0..={s_top}"));
    run.param("dim", format!("1..={dim_top}"));
    run.param("other_layers", format!("t <= {t_top}"));
    run.param("c_max", c_max);
    let cases: Vec<(usize, usize)> = (0..=s_top).flat_map(|s| (1..=dim_top).map(move |k| (s, k))).collect();
    let results: Vec<Result<Option<String>, NilError>> = cases
        .par_iter()
        .map(|&(s, k)| {
            let bound = SUPPORT_BOUND + s;
            let m = StructuredModule::from(concentrated(s, k)).tensor(StructuredModule::free(1, bound));
            let table = filtration_table(&m, t_top, bound, c_max)?;
            for (&t, r) in &table.quotients {
                for j in 0..=SUPPORT_BOUND.min(bound - t) {
                    let expect = if t == s && j.is_power_of_two() { k } else { 0 };
                    if r.dim(j) != expect {
                        return Ok(Some(format!(
                            "K = F2^{k} in degree {s}: dim R_{t} in degree {j} is {}, expected {expect}",
                            r.dim(j)
                        )));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    for r in results {
        match r {
            Ok(Some(w)) => return Ok(Verdict::Refuted { witness: w }),
            Ok(None) => {}
            Err(e) => return undetermined(&e).ok_or(e.into()),
        }
    }
    Ok(Verdict::Verified {
        coverage: format!("{} modules K, R_t for t <= {t_top}, degrees <= {SUPPORT_BOUND}", cases.len()),
        witness: None,
    })
}

/// Modules `K` for the support laws: spheres, `RP^2`, and the first corpus
/// modules of small top degree.
fn support_inputs(run: &mut Run, take: usize, max_top: usize) -> Vec<FiniteUnstableModule> {
    run.param("seed", run.params.seed);
    run.param("corpus_modules", take);
    run.param("corpus_max_top", max_top);
    let mut ks = vec![
        FiniteUnstableModule::sphere(0),
        FiniteUnstableModule::sphere(1),
        FiniteUnstableModule::sphere(3),
        rp2(),
    ];
    ks.extend(module_corpus(run.params.seed, take, max_top, run.params.max_dim));
    ks
}

fn layer_support(k: &FiniteUnstableModule, c_max: usize) -> Result<Vec<FiniteUnstableModule>, NilError> {
    let bound = SUPPORT_BOUND + k.top_degree();
    let m = StructuredModule::from(k.clone()).tensor(StructuredModule::free(1, bound));
    Ok(filtration_table(&m, k.top_degree(), bound, c_max)?
        .quotients
        .into_values()
        .collect())
}

fn support_u1(run: &mut Run) -> Result<Verdict, LawError> {
    let c_max = run.params.c_max;
    let ks = support_inputs(run, 8, 4);
    run.param("degree_bound", SUPPORT_BOUND);
    run.param("c_max", c_max);
    let results: Vec<Result<Vec<FiniteUnstableModule>, NilError>> =
        ks.par_iter().map(|k| layer_support(k, c_max)).collect();
    let mut layers = 0;
    for (r, k) in results.into_iter().zip(&ks) {
        let rs = match r {
            Ok(rs) => rs,
            Err(e) => return undetermined(&e).ok_or(e.into()),
        };
        for (s, r) in rs.iter().enumerate() {
            if let Some(j) = (0..=r.top_degree().min(SUPPORT_BOUND)).find(|&j| r.dim(j) > 0 && !j.is_power_of_two()) {
                return Ok(Verdict::Refuted {
                    witness: format!("K = {}: R_{s}(K x F(1)) is nonzero in degree {j}", k.name()),
                });
            }
            layers += 1;
        }
    }
    Ok(Verdict::Verified {
        coverage: format!("{layers} layers of {} modules K x F(1), degrees <= {SUPPORT_BOUND}", ks.len()),
        witness: None,
    })
}

fn two_powers(d: usize) -> bool {
    d.is_power_of_two() || (1..d).any(|a| a.is_power_of_two() && (d - a).is_power_of_two())
}

fn support_u2(run: &mut Run) -> Result<Verdict, LawError> {
    let c_max = run.params.c_max;
    let ks = support_inputs(run, 4, 3);
    run.param("degree_bound", SUPPORT_BOUND);
    run.param("c_max", c_max);
    let mut squares = 0;
    for k in &ks {
        let rs = match layer_support(k, c_max) {
            Ok(rs) => rs,
            Err(e) => return undetermined(&e).ok_or(e.into()),
        };
        for (s, r) in rs.into_iter().enumerate() {
            let r = StructuredModule::from(r);
            let square = r.clone().tensor(r);
            for d in 0..=SUPPORT_BOUND {
                if square.dim(d)? > 0 && !two_powers(d) {
                    return Ok(Verdict::Refuted {
                        witness: format!("K = {}: R_{s} x R_{s} is nonzero in degree {d}", k.name()),
                    });
                }
            }
            squares += 1;
        }
    }
    // the layers of F(1) x F(1) itself
    let f = StructuredModule::free(1, SUPPORT_BOUND);
    let ff = f.clone().tensor(f);
    let table = match filtration_table(&ff, 3, SUPPORT_BOUND, c_max) {
        Ok(t) => t,
        Err(e) => return undetermined(&e).ok_or(e.into()),
    };
    for (&t, r) in &table.quotients {
        for d in 0..=r.top_degree() {
            let allowed = t == 0 && two_powers(d);
            if r.dim(d) > 0 && !allowed {
                return Ok(Verdict::Refuted {
                    witness: format!("R_{t}(F(1) x F(1)) is nonzero in degree {d}"),
                });
            }
        }
    }
    Ok(Verdict::Verified {
        coverage: format!(
            "{squares} tensor squares of layers and the layers R_0..R_3 of F(1) x F(1), degrees <= {SUPPORT_BOUND}"
        ),
        witness: None,
    })
}

fn prop_1_8(run: &mut Run) -> Result<Verdict, LawError> {
    let corpus = run.corpus();
    let c_max = run.params.c_max;
    run.param("c_max", c_max);
    let mut rng = ChaCha8Rng::seed_from_u64(run.params.seed ^ 0x18);
    let cuts: Vec<usize> = corpus.iter().map(|m| rng.gen_range(1..=m.top_degree().max(1))).collect();
    let results: Vec<Result<Option<String>, LawError>> = corpus
        .par_iter()
        .zip(&cuts)
        .enumerate()
        .map(|(idx, (m, &k))| {
            let n = m.quotient(&degrees_at_least(m, k))?;
            let (sm, sn) = (StructuredModule::from(m.clone()), StructuredModule::from(n));
            for s in 0..k.min(m.top_degree() + 1) {
                let (rm, rn) = (rs_layer(&sm, s, m.top_degree(), c_max)?, rs_layer(&sn, s, m.top_degree(), c_max)?);
                if rm.dims() != rn.dims() {
                    return Ok(Some(format!(
                        "sample {idx}, k = {k}, s = {s}: R_s(M) dims {:?}, R_s(N) dims {:?}",
                        rm.dims(),
                        rn.dims()
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    for r in results {
        if let Some(w) = r? {
            return Ok(Verdict::Refuted { witness: w });
        }
    }
    // (S^1 + F2^2[3]) x F(1) -> S^1 x F(1), kernel F2^2[3] x F(1) in Nil_3
    let bound = SUPPORT_BOUND + 2;
    let k = FiniteUnstableModule::sphere(1).direct_sum(&concentrated(3, 2));
    let m = StructuredModule::from(k).tensor(StructuredModule::free(1, bound));
    let n = StructuredModule::from(FiniteUnstableModule::sphere(1)).tensor(StructuredModule::free(1, bound));
    for s in 0..3 {
        let (rm, rn) = match (rs_layer(&m, s, bound, c_max), rs_layer(&n, s, bound, c_max)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return undetermined(&e).ok_or(e.into()),
        };
        if let Some(j) = (0..=bound - s).find(|&j| rm.dim(j) != rn.dim(j)) {
            return Ok(Verdict::Refuted {
                witness: format!("(S1 + K[3]) x F(1): R_{s} dims differ in degree {j}"),
            });
        }
    }
    Ok(Verdict::Verified {
        coverage: format!(
            "{} finite sequences with K = M in degrees >= k, and (S1 + F2^2[3]) x F(1) with k = 3 through degree {bound}",
            corpus.len()
        ),
        witness: None,
    })
}

fn prop_1_9(run: &mut Run) -> Result<Verdict, LawError> {
    let corpus = run.corpus();
    let c_max = run.params.c_max;
    run.param("c_max", c_max);
    let results: Vec<Result<(usize, Option<String>), LawError>> = corpus
        .par_iter()
        .enumerate()
        .map(|(idx, m)| {
            let top = m.top_degree();
            let mut checked = 0;
            for d in 1..=top / 2 {
                // M' = M in degrees >= d is in Nil_d; N is generated by the
                // degrees below 2d, so M'/N is in Nil_{2d}
                let mp = m.restrict(&degrees_at_least(m, d))?;
                let low: BTreeMap<usize, Vec<Gf2Vector>> = (d..2 * d)
                    .map(|e| (e, (0..mp.dim(e)).map(|j| Gf2Vector::unit(mp.dim(e), j)).collect()))
                    .collect();
                let n = Submodule::explicit("N", mp.generated_submodule(&low));
                let smp = StructuredModule::from(mp);
                for s in d..2 * d {
                    let (r, image) = rs_layer_with_image(&smp, &n, s, top, c_max)?;
                    let top_r = r.top_degree();
                    let verdict = strong_f_iso(&r.into(), &Submodule::explicit("image", image), top_r, c_max)?;
                    if verdict != FIsoVerdict::Yes {
                        return Ok((checked, Some(format!("sample {idx}, d = {d}, s = {s}: {verdict:?}"))));
                    }
                    checked += 1;
                }
            }
            Ok((checked, None))
        })
        .collect();
    let mut checked = 0;
    for r in results {
        let (c, w) = r?;
        if let Some(w) = w {
            return Ok(Verdict::Refuted { witness: w });
        }
        checked += c;
    }
    // K = F2[1] + F2[3], M = K x F(1), N = F2[1] x F(1): d = 1, s = 1
    let known = 2 * 16;
    run.param("structured_known_to", known);
    let k = FiniteUnstableModule::trivial_action("K", vec![0, 1, 0, 1]);
    let m = StructuredModule::from(k).tensor(StructuredModule::free(1, known + 8));
    let exact = unbounded(&m);
    let n = Submodule::from_fn("F2[1] x F(1)", move |d| {
        let dim = exact.dim(d)?;
        Ok(if d >= 2 && (d - 1).is_power_of_two() {
            vec![Gf2Vector::unit(dim, 0)]
        } else {
            Vec::new()
        })
    });
    let verdict = rs_layer_with_image(&m, &n, 1, known + 1, c_max).and_then(|(r, image)| {
        strong_f_iso_truncated(&r, &Submodule::explicit("image", image), known, c_max)
    });
    match verdict {
        Ok(FIsoVerdict::Yes) => {}
        Ok(FIsoVerdict::Unknown { degree, reason }) => {
            return Ok(Verdict::Undetermined {
                budget: format!("structured instance, degree {degree}: {reason}"),
            })
        }
        Ok(v) => {
            return Ok(Verdict::Refuted {
                witness: format!("(F2[1] + F2[3]) x F(1), s = 1: {v:?}"),
            })
        }
        Err(e) => return undetermined(&e).ok_or(e.into()),
    }
    Ok(Verdict::Verified {
        coverage: format!(
            "{checked} (module, d, s) finite instances and (F2[1] + F2[3]) x F(1) with d = 1 through degree {known}"
        ),
        witness: None,
    })
}

fn certificate(m: &StructuredModule, x: &ModuleElement, s_max: usize, c_max: usize) -> Result<NilpotenceCertificate, LawError> {
    let cert = nilpotence_degree(m, x, s_max, c_max)?;
    if !replay_certificate(m, x, &cert)? {
        return Err(LawError::Replay(format!("{m}, element {x:?}")));
    }
    Ok(cert)
}

fn susp_formula(run: &mut Run) -> Result<Verdict, LawError> {
    let c_max = run.params.c_max;
    let max_degree = 8;
    run.param("seed", run.params.seed);
    run.param("element_degree", format!("<= {max_degree}"));
    run.param("s", "1..=3");
    run.param("c_max", c_max);
    let mut shapes: Vec<StructuredModule> = vec![
        rp2().into(),
        StructuredModule::RpInfinity,
        StructuredModule::free(1, 64),
        StructuredModule::from(rp2()).tensor(StructuredModule::free(1, 64)),
    ];
    shapes.extend(module_corpus(run.params.seed, 20, run.params.max_top, run.params.max_dim).into_iter().map(Into::into));
    let (mut identities, mut shifted, mut undecided) = (0, 0, 0);
    for m in &shapes {
        for d in 1..=max_degree {
            let dim = m.dim(d)?;
            for j in 0..dim {
                let x = ModuleElement::basis(d, dim, j);
                let cert = certificate(m, &x, d + 2, c_max)?;
                for s in 1..=3 {
                    let sm = m.clone().suspend(s);
                    let sx = x.suspend(s);
                    for k in 0..=(d + s) as i64 {
                        let lhs = if k >= s as i64 {
                            m.sq_lower(k - s as i64, &x)?.suspend(s)
                        } else {
                            ModuleElement::zero()
                        };
                        let rhs = sm.sq_lower(k, &sx)?;
                        if lhs != rhs {
                            return Ok(Verdict::Refuted {
                                witness: format!("{m}, basis {j} of degree {d}, s = {s}, k = {k}"),
                            });
                        }
                        identities += 1;
                    }
                    let scert = certificate(&sm, &sx, d + 2 + s, c_max)?;
                    if cert.is_unknown() || scert.is_unknown() {
                        undecided += 1;
                        continue;
                    }
                    if scert.at_least() != cert.at_least() + s || scert.exact() != cert.exact().map(|e| e + s) {
                        return Ok(Verdict::Refuted {
                            witness: format!("{m}, basis {j} of degree {d}, s = {s}: {cert} vs {scert}"),
                        });
                    }
                    shifted += 1;
                }
            }
        }
    }
    Ok(Verdict::Verified {
        coverage: format!(
            "{identities} identities on {} shapes, {shifted} certificate shifts ({undecided} undecided at budget)",
            shapes.len()
        ),
        witness: None,
    })
}

fn tensor_nil(run: &mut Run) -> Result<Verdict, LawError> {
    let c_max = run.params.c_max;
    run.param("seed", run.params.seed);
    run.param("corpus_pairs", 20);
    run.param("c_max", c_max);
    let corpus = module_corpus(run.params.seed, 40, run.params.max_top, run.params.max_dim);
    let mut cases: Vec<(StructuredModule, StructuredModule, ModuleElement, ModuleElement)> = Vec::new();
    for pair in corpus.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (xs, ys) = (basis_elements(a), basis_elements(b));
        if let (Some(x0), Some(y0)) = (xs.first(), ys.first()) {
            cases.push((a.clone().into(), b.clone().into(), x0.clone(), y0.clone()));
            cases.push((a.clone().into(), b.clone().into(), xs[xs.len() - 1].clone(), ys[ys.len() - 1].clone()));
        }
    }
    let f1 = StructuredModule::free(1, 64);
    for d in 1..=2 {
        for i in 0..4 {
            cases.push((rp2().into(), f1.clone(), ModuleElement::basis(d, 1, 0), ModuleElement::basis(1 << i, 1, 0)));
        }
    }
    let (mut checked, mut undecided) = (0, 0);
    for (a, b, x, y) in &cases {
        let ca = certificate(a, x, x.degree().unwrap_or(0) + 1, c_max)?;
        let cb = certificate(b, y, y.degree().unwrap_or(0) + 1, c_max)?;
        if ca.is_unknown() || cb.is_unknown() {
            undecided += 1;
            continue;
        }
        let (u, v) = (ca.at_least(), cb.at_least());
        let t = a.clone().tensor(b.clone());
        let xy = t.tensor_element(x, y)?;
        let ct = certificate(&t, &xy, u + v, c_max)?;
        if ct.at_least() >= u + v {
            checked += 1;
        } else if ct.is_unknown() {
            undecided += 1;
        } else {
            return Ok(Verdict::Refuted {
                witness: format!("{a} x {b}: x >= {u}, y >= {v}, but x (x) y: {ct}"),
            });
        }
    }
    Ok(Verdict::Verified {
        coverage: format!("{checked} of {} element pairs ({undecided} undecided at budget)", cases.len()),
        witness: None,
    })
}

fn lemma_1_12(run: &mut Run) -> Result<Verdict, LawError> {
    let bound = 32;
    let budget = 8;
    run.param("degree_bound", bound);
    run.param("budget", budget);
    let f1 = StructuredModule::free(1, 2 * SUPPORT_BOUND);
    // F(1) + F(1), realized as F2^2 (in degree 0) x F(1)
    let ff = StructuredModule::from(concentrated(0, 2)).tensor(StructuredModule::free(1, 2 * SUPPORT_BOUND));
    let diag = |from: usize| {
        let exact = unbounded(&ff);
        Submodule::from_fn("diagonal", move |d| {
            Ok(if exact.dim(d)? == 2 && d >= from {
                vec![Gf2Vector::from_bits(&[1, 1])]
            } else {
                Vec::new()
            })
        })
    };
    let cases: Vec<(&str, StructuredModule, Submodule, usize)> = vec![
        ("F(1), J = F(1)", f1.clone(), Submodule::whole(&f1), 0),
        ("F(1), J = 0", f1.clone(), Submodule::zero(), 0),
        ("F(1), J = powers >= 8", f1.clone(), Submodule::powers_of_two(3), 3),
        ("F(1) + F(1), J = diagonal", ff.clone(), diag(0), 0),
        ("F(1) + F(1), J = diagonal in degrees >= 4", ff.clone(), diag(4), 2),
    ];
    let mut found = Vec::new();
    for (name, h, j, expect) in cases {
        let sat = match sq0_saturate(&h, &j, bound, budget) {
            Ok(s) => s,
            Err(NilError::SaturationCheck(msg)) => {
                return Ok(Verdict::Refuted {
                    witness: format!("{name}: {msg}"),
                })
            }
            Err(e) => return undetermined(&e).ok_or(e.into()),
        };
        if sat.k != expect {
            return Ok(Verdict::Failed {
                error: format!("{name}: stabilized at k = {}, expected {expect}", sat.k),
            });
        }
        found.push(format!("{name}: k = {}", sat.k));
    }
    Ok(Verdict::Verified {
        coverage: format!("both properties re-checked for {}", found.join("; ")),
        witness: None,
    })
}

// ---------------------------------------------------------------------------
// Tor laws

/// The algebras every Tor law runs on.
pub fn test_algebras() -> Vec<FiniteUnstableAlgebra> {
    let p = |g, h| FiniteUnstableAlgebra::truncated_polynomial(g, h).expect("valid truncation");
    vec![
        FiniteUnstableAlgebra::trivial(),
        FiniteUnstableAlgebra::exterior(3),
        p(1, 4),
        p(2, 3),
        p(1, 3)
            .tensor(&FiniteUnstableAlgebra::exterior(1))
            .expect("tensor of unstable algebras"),
        FiniteUnstableAlgebra::exterior(1)
            .tensor(&FiniteUnstableAlgebra::exterior(2))
            .expect("tensor of unstable algebras"),
    ]
}

const TOR_S_MAX: usize = 3;

fn tor_corner(run: &mut Run) -> Result<Verdict, LawError> {
    run.param("s_max", TOR_S_MAX);
    run.param("t_max", "s_max * top degree (at least 4)");
    let algebras = test_algebras();
    let mut summary = Vec::new();
    let mut d2 = 0;
    for a in &algebras {
        let t_max = (TOR_S_MAX * a.top_degree()).max(4);
        let page = match bar_tor(a, TOR_S_MAX, t_max) {
            Ok(p) => p,
            Err(TorError::DSquared { s, t }) => {
                return Ok(Verdict::Refuted {
                    witness: format!("{}: d^2 != 0 at (s, t) = ({s}, {t})", a.name()),
                })
            }
            Err(e) => return Err(e.into()),
        };
        match check_corner(&page, a) {
            Ok(()) => {}
            Err(TorError::Corner { degree, detail }) => {
                return Ok(Verdict::Refuted {
                    witness: format!("{}: Tor^-1 vs Q in degree {degree}: {detail}", a.name()),
                })
            }
            Err(e) => return Err(e.into()),
        }
        if !page.connectivity_holds() {
            return Ok(Verdict::Refuted {
                witness: format!("{}: a class below the connectivity line", a.name()),
            });
        }
        d2 += page.checks.d_squared;
        summary.push(format!("{} (t <= {t_max})", a.name()));
    }
    Ok(Verdict::Verified {
        coverage: format!("{}; {d2} differentials checked for d^2 = 0", summary.join(", ")),
        witness: None,
    })
}

fn tor_exterior(run: &mut Run) -> Result<Verdict, LawError> {
    let (s_max, t_max) = (4, 12);
    run.param("s_max", s_max);
    run.param("t_max", t_max);
    let a = FiniteUnstableAlgebra::exterior(3);
    let page = bar_tor(&a, s_max, t_max)?;
    for s in 0..=s_max {
        for t in 0..=t_max {
            let expect = usize::from(t == 3 * s);
            if page.dim(s, t) != expect {
                return Ok(Verdict::Refuted {
                    witness: format!("dim Tor^(-{s},{t}) = {}, expected {expect}", page.dim(s, t)),
                });
            }
        }
    }
    Ok(Verdict::Verified {
        coverage: format!("all (s, t) with s <= {s_max}, t <= {t_max}"),
        witness: None,
    })
}

fn tor_columns(run: &mut Run) -> Result<Verdict, LawError> {
    let c_max = run.params.c_max;
    run.param("s_max", TOR_S_MAX);
    run.param("c_max", c_max);
    let mut summary = Vec::new();
    for a in test_algebras() {
        let t_max = (TOR_S_MAX * a.top_degree()).max(4);
        let page = bar_tor(&a, TOR_S_MAX, t_max)?;
        let mut d = None;
        for s in 1..=TOR_S_MAX {
            let col = column_nilpotence(&page, &a, s, d, c_max)?;
            d = Some(col.d);
            match col.holds() {
                Some(true) => {}
                Some(false) => {
                    return Ok(Verdict::Refuted {
                        witness: format!("{}: {col} fails", a.name()),
                    })
                }
                None => {
                    return Ok(Verdict::Undetermined {
                        budget: format!("{}: {col}, column incomplete at t <= {t_max}", a.name()),
                    })
                }
            }
        }
        summary.push(format!("{} (d = {})", a.name(), d.unwrap_or(0)));
    }
    Ok(Verdict::Verified {
        coverage: format!("columns 1..={TOR_S_MAX} of {}", summary.join(", ")),
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> LawParams {
        LawParams {
            samples: 12,
            ..LawParams::default()
        }
    }

    fn verified(id: &str, n: Option<usize>) -> LawReport {
        let r = run_law(id, n, &quick()).unwrap();
        assert!(matches!(r.verdict, Verdict::Verified { .. }), "{}", r.line(false));
        r
    }

    #[test]
    fn corpus_is_valid_bounded_and_deterministic() {
        let a = module_corpus(3, 30, 10, 3);
        let b = module_corpus(3, 30, 10, 3);
        assert_eq!(a.len(), 30);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
            assert!(x.top_degree() <= 10);
            assert!(x.dims().iter().all(|&d| d <= 3));
            assert!(make_finite(&x.description()).is_ok());
        }
        assert_ne!(module_corpus(4, 30, 10, 3), a);
    }

    #[test]
    fn lemma_5_7_first_witness() {
        let r = verified("lemma_5_7", Some(1));
        assert!(matches!(&r.verdict, Verdict::Verified { witness: Some(w), .. } if w == "(Sq1, Sq1)"));
    }

    #[test]
    fn display_law_is_expected_refuted() {
        let r = run_law("adem_display_5", Some(2), &quick()).unwrap();
        let Verdict::Refuted { witness } = &r.verdict else { panic!("{}", r.line(false)) };
        assert!(witness.contains("difference = Sq7 Sq1"), "{witness}");
        assert!(!r.is_failure());
    }

    #[test]
    fn unknown_ids_and_instances_are_errors() {
        assert!(matches!(run_law("nope", None, &quick()), Err(LawError::UnknownId(_))));
        assert!(matches!(run_law("lemma_5_7", Some(9), &quick()), Err(LawError::NoInstance { .. })));
        assert!(matches!(run_law("prop_2_4", Some(1), &quick()), Err(LawError::NoInstance { .. })));
        assert!(run_suite(&["nope".into()], &quick()).is_err());
    }

    #[test]
    fn sampled_laws_hold_on_a_small_corpus() {
        for id in ["lemma_6_2", "prop_2_4", "prop_1_8", "prop_1_9"] {
            verified(id, None);
        }
    }

    #[test]
    fn suite_output_is_deterministic_and_sorted() {
        let params = LawParams {
            n: Some(1),
            ..quick()
        };
        let only: Vec<String> = ["lemma_5_7", "adem_display_5", "lemma_6_2"].map(String::from).to_vec();
        let a = run_suite(&only, &params).unwrap();
        let b = run_suite(&only, &params).unwrap();
        let ids: Vec<String> = a.iter().map(LawReport::name).collect();
        assert_eq!(ids, vec!["adem_display_5[n=1]", "lemma_5_7[n=1]", "lemma_6_2"]);
        assert_eq!(suite_json(&params, &a, false), suite_json(&params, &b, false));
    }
}
