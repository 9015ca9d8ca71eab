//! Named verification suites and their reports.
//!
//! Every suite is a pure function of its [`RunConfig`]: work is spread
//! over a rayon pool of the configured size, but results are merged in a
//! fixed order, so reports are byte-identical whatever the worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::embed::{
    product_operator, regular_from_usco, regular_operators, three_point_example, usco_from_regular, FiniteTopSpace,
    RegularOperator,
};
use crate::functionals::{
    axiom_check, axiom_check_term, check_eq1, check_eq1_family, constructible_terms, grid, sample_term, AxiomConfig,
    AxiomOutcome, Term, CHECK_LEVELS,
};
use crate::inclusion::{enumerate_ih, g_map, g_map_by_image, InclusionHyperspace};
use crate::rational::to_text;
use crate::setkit::{GroundSet, PointMap, SetFamily};
use crate::subbase::{BinaryVerdict, NormalVerdict};
use crate::superext::{
    count_mls, count_mls_by_cliques, enumerate_mls, enumeration_cap, lambda_map, lambda_map_by_image, plus_subbase,
    MaxLinkedSystem,
};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Eq1,
    Axioms,
    FunctorLaws,
    SubbaseLambda,
    UscoRoundtrip,
    Counts,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Eq1, Suite::Axioms, Suite::FunctorLaws, Suite::SubbaseLambda, Suite::UscoRoundtrip, Suite::Counts];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eq1 => "eq1",
            Suite::Axioms => "axioms",
            Suite::FunctorLaws => "functor-laws",
            Suite::SubbaseLambda => "subbase-lambda",
            Suite::UscoRoundtrip => "usco-roundtrip",
            Suite::Counts => "counts",
        }
    }

    /// One-line statement of what the suite verifies.
    pub fn property(self) -> &'static str {
        match self {
            Suite::Eq1 => "max-min equals min-max for every maximal linked system on the grid {-1,0,1,2}^n",
            Suite::Axioms => {
                "self-dual terms are monotone, homogeneous and weakly additive; known bad functionals are caught"
            }
            Suite::FunctorLaws => "lambda and G preserve identities and composition; preimage and image forms agree",
            Suite::SubbaseLambda => "the subbase {F+} of lambda X is binary and normal",
            Suite::UscoRoundtrip => {
                "usco maps built from regular operators are point-fixed and usc; the way back is regular"
            }
            Suite::Counts => "maximal linked system count matches the clique-based count",
        }
    }

    /// Largest `n` the suite accepts (before the global enumeration cap).
    pub fn max_n(self) -> usize {
        match self {
            Suite::Eq1 => 6,
            Suite::Axioms => 6,
            Suite::FunctorLaws => 4,
            Suite::SubbaseLambda => 6,
            Suite::UscoRoundtrip => 5,
            Suite::Counts => 7,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suite: Suite,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    /// Rayon worker count; 0 uses the default pool size.
    pub workers: usize,
    /// For the axiom suite: check this term instead of the catalogue.
    pub term: Option<Term>,
}

impl RunConfig {
    pub fn new(suite: Suite, n: usize) -> Self {
        RunConfig { suite, n, seed: 0, trials: 500, workers: 0, term: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: String,
    pub n: usize,
    pub property: String,
    pub seed: u64,
    pub trials: usize,
    pub checks_run: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<u64>,
    pub pass: bool,
    pub failures: Vec<Failure>,
}

impl Report {
    fn new(config: &RunConfig) -> Self {
        Report {
            suite: config.suite.name().into(),
            n: config.n,
            property: config.suite.property().into(),
            seed: config.seed,
            trials: config.trials,
            checks_run: 0,
            expected: None,
            actual: None,
            pass: true,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, check: impl Into<String>, witness: impl Into<String>) {
        self.failures.push(Failure { check: check.into(), witness: witness.into() });
    }

    fn finish(mut self) -> Self {
        self.pass = self.failures.is_empty();
        self
    }

    pub fn to_json(&self) -> String {
        crate::io::to_pretty(self)
    }

    /// One header line and one data line, derived from the JSON fields.
    pub fn to_csv_summary(&self) -> String {
        let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "suite,n,seed,trials,checks_run,failures,expected,actual,pass\n{},{},{},{},{},{},{},{},{}\n",
            self.suite,
            self.n,
            self.seed,
            self.trials,
            self.checks_run,
            self.failures.len(),
            opt(self.expected),
            opt(self.actual),
            self.pass
        )
    }
}

/// Runs the configured suite on a pool of `config.workers` threads.
pub fn run_verify_suite(config: &RunConfig) -> Result<Report> {
    let limit = config.suite.max_n().min(enumeration_cap());
    if config.n == 0 || config.n > limit {
        return Err(Error::TooLarge { what: "suite size n", size: config.n, limit });
    }
    if config.trials == 0 {
        return Err(Error::Parse("trials must be at least 1".into()));
    }
    if config.term.is_some() && config.suite != Suite::Axioms {
        return Err(Error::InvalidTerm("a term is only used by the axioms suite".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
    pool.install(|| {
        let ground = GroundSet::new(config.n)?;
        let report = Report::new(config);
        let report = match config.suite {
            Suite::Eq1 => eq1_suite(ground, report),
            Suite::Axioms => axioms_suite(ground, config, report),
            Suite::FunctorLaws => functor_suite(ground, report),
            Suite::SubbaseLambda => subbase_suite(ground, report),
            Suite::UscoRoundtrip => usco_suite(ground, report),
            Suite::Counts => counts_suite(ground, report),
        }?;
        Ok(report.finish())
    })
}

fn values_text(values: &[Rational]) -> String {
    values.iter().map(to_text).collect::<Vec<_>>().join(",")
}

fn family_text(family: &SetFamily) -> String {
    family.iter().map(|s| s.to_hex()).collect::<Vec<_>>().join(" ")
}

fn eq1_suite(ground: GroundSet, mut report: Report) -> Result<Report> {
    let lambda = enumerate_mls(ground)?;
    let functions = grid(ground, &CHECK_LEVELS);
    let failures: Vec<Vec<Failure>> = lambda
        .systems()
        .par_iter()
        .map(|eta| {
            functions
                .iter()
                .filter_map(|f| {
                    let r = check_eq1(eta, f).expect("same ground");
                    (!r.equal).then(|| Failure {
                        check: format!("system {}", family_text(eta.minimal())),
                        witness: format!(
                            "f=({}) max-min {} min-max {}",
                            values_text(f.values()),
                            to_text(&r.max_min),
                            to_text(&r.min_max)
                        ),
                    })
                })
                .collect()
        })
        .collect();
    report.failures.extend(failures.into_iter().flatten());
    report.checks_run = (lambda.len() * functions.len()) as u64;

    // The non-maximal family {X} must break the identity somewhere. It
    // is a control, not counted as a check.
    if ground.len() >= 2 {
        let control = SetFamily::new(ground, [ground.full()])?;
        let detected = functions.iter().any(|f| !check_eq1_family(&control, f).expect("same ground").equal);
        if !detected {
            report.fail("non-maximal control", "max-min equals min-max on the whole grid");
        }
    }
    Ok(report)
}

fn outcome_failure(label: &str, outcome: AxiomOutcome) -> Option<Failure> {
    match outcome {
        AxiomOutcome::Pass { .. } => None,
        AxiomOutcome::Counterexample(cx) => Some(Failure { check: label.to_string(), witness: cx.to_string() }),
    }
}

/// Random terms checked next to the fixed catalogue.
const SAMPLED_TERMS: usize = 20;

fn axioms_suite(ground: GroundSet, config: &RunConfig, mut report: Report) -> Result<Report> {
    let axiom_config = AxiomConfig { trials: config.trials, seed: config.seed, normalized: false };
    if let Some(term) = &config.term {
        let outcome = axiom_check_term(term, ground, &axiom_config)?;
        report.checks_run = config.trials as u64;
        report.failures.extend(outcome_failure("term", outcome));
        return Ok(report);
    }

    let mut terms = constructible_terms(ground)?;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(config.seed);
    terms.extend((0..SAMPLED_TERMS).map(|_| sample_term(&mut rng, ground, 2)));
    for (i, term) in terms.iter().enumerate() {
        let outcome = axiom_check_term(term, ground, &axiom_config)?;
        report.failures.extend(outcome_failure(&format!("term {i}"), outcome));
    }

    // Negative controls: each must be caught.
    let max_plus_min = |f: &[Rational]| f.iter().max().expect("nonempty") + f.iter().min().expect("nonempty");
    let square = |f: &[Rational]| &f[0] * &f[0];
    if axiom_check(max_plus_min, ground, &axiom_config).is_pass() {
        report.fail("control max+min", "no counterexample found");
    }
    if axiom_check(square, ground, &axiom_config).is_pass() {
        report.fail("control f(0)^2", "no counterexample found");
    }
    report.checks_run = ((terms.len() + 2) * config.trials) as u64;
    Ok(report)
}

fn grounds_up_to(n: usize) -> Vec<GroundSet> {
    (1..=n).map(|k| GroundSet::new(k).expect("small")).collect()
}

fn map_text(f: &PointMap) -> String {
    format!("{:?}", f.images())
}

/// One functor on finite sets, for the generic law checks.
trait SetFunctor: Sync {
    type Obj: PartialEq + fmt::Debug + Sync;
    const NAME: &'static str;
    fn objects(&self, ground: GroundSet) -> Result<Vec<Self::Obj>>;
    fn apply(&self, f: &PointMap, a: &Self::Obj) -> Result<Self::Obj>;
    fn apply_by_image(&self, f: &PointMap, a: &Self::Obj) -> Result<Self::Obj>;
}

struct Lambda;
struct Gx;

impl SetFunctor for Lambda {
    type Obj = MaxLinkedSystem;
    const NAME: &'static str = "lambda";
    fn objects(&self, ground: GroundSet) -> Result<Vec<MaxLinkedSystem>> {
        Ok(enumerate_mls(ground)?.systems().to_vec())
    }
    fn apply(&self, f: &PointMap, a: &MaxLinkedSystem) -> Result<MaxLinkedSystem> {
        lambda_map(f, a)
    }
    fn apply_by_image(&self, f: &PointMap, a: &MaxLinkedSystem) -> Result<MaxLinkedSystem> {
        lambda_map_by_image(f, a)
    }
}

impl SetFunctor for Gx {
    type Obj = InclusionHyperspace;
    const NAME: &'static str = "G";
    fn objects(&self, ground: GroundSet) -> Result<Vec<InclusionHyperspace>> {
        enumerate_ih(ground)
    }
    fn apply(&self, f: &PointMap, a: &InclusionHyperspace) -> Result<InclusionHyperspace> {
        g_map(f, a)
    }
    fn apply_by_image(&self, f: &PointMap, a: &InclusionHyperspace) -> Result<InclusionHyperspace> {
        g_map_by_image(f, a)
    }
}

/// Identity, composition and formula agreement over every map between
/// grounds of size at most `n`. Returns the number of checks.
fn functor_laws<F: SetFunctor>(functor: &F, n: usize, report: &mut Report) -> Result<u64> {
    let grounds = grounds_up_to(n);
    let objects: Vec<Vec<F::Obj>> = grounds.iter().map(|&g| functor.objects(g)).collect::<Result<_>>()?;
    let mut checks = 0u64;

    for (gi, &g) in grounds.iter().enumerate() {
        let id = PointMap::identity(g);
        for a in &objects[gi] {
            checks += 1;
            if functor.apply(&id, a)? != *a {
                report.fail(format!("{} identity", F::NAME), format!("{a:?}"));
            }
        }
    }

    for (ai, &a) in grounds.iter().enumerate() {
        for &b in &grounds {
            for f in PointMap::all(a, b) {
                for x in &objects[ai] {
                    checks += 1;
                    let pre = functor.apply(&f, x)?;
                    let img = functor.apply_by_image(&f, x)?;
                    if pre != img {
                        report.fail(format!("{} formulas", F::NAME), format!("f={} on {x:?}", map_text(&f)));
                    }
                }
            }
        }
    }

    // (g ∘ f) against g after f, over all composable pairs.
    let mut triples = Vec::new();
    for (ai, &a) in grounds.iter().enumerate() {
        for &b in &grounds {
            for &c in &grounds {
                triples.push((a, b, c, ai));
            }
        }
    }
    let results: Vec<(u64, Vec<Failure>)> = triples
        .par_iter()
        .map(|&(a, b, c, ai)| {
            let mut local = Vec::new();
            let mut count = 0u64;
            for f in PointMap::all(a, b) {
                let after_f: Vec<F::Obj> = objects[ai].iter().map(|x| functor.apply(&f, x)).collect::<Result<_>>()?;
                for g in PointMap::all(b, c) {
                    let gf = f.then(&g)?;
                    for (x, fx) in objects[ai].iter().zip(&after_f) {
                        count += 1;
                        if functor.apply(&gf, x)? != functor.apply(&g, fx)? {
                            local.push(Failure {
                                check: format!("{} composition", F::NAME),
                                witness: format!("f={} g={} on {x:?}", map_text(&f), map_text(&g)),
                            });
                        }
                    }
                }
            }
            Ok((count, local))
        })
        .collect::<Result<_>>()?;
    for (count, local) in results {
        checks += count;
        report.failures.extend(local);
    }
    Ok(checks)
}

fn functor_suite(ground: GroundSet, mut report: Report) -> Result<Report> {
    let n = ground.len();
    let mut checks = functor_laws(&Lambda, n, &mut report)?;
    checks += functor_laws(&Gx, n, &mut report)?;
    report.checks_run = checks;
    Ok(report)
}

fn subbase_suite(ground: GroundSet, mut report: Report) -> Result<Report> {
    let lambda = enumerate_mls(ground)?;
    let sb = plus_subbase(&lambda)?;
    if let BinaryVerdict::NotBinary { witness } = sb.is_binary()? {
        report.fail("binary", format!("linked members {witness:?} have no common point"));
    }
    if let NormalVerdict::NotNormal { first, second } = sb.is_normal()? {
        report.fail("normal", format!("members {first} and {second} cannot be separated"));
    }
    report.checks_run = 2;
    Ok(report)
}

/// Every topology on `k` points, as minimal-neighbourhood vectors in
/// lexicographic order.
pub fn all_spaces(k: usize) -> Vec<FiniteTopSpace> {
    let choices: Vec<Vec<u64>> = (0..k).map(|x| (0..1u64 << k).filter(|m| m >> x & 1 == 1).collect()).collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn walk(choices: &[Vec<u64>], current: &mut Vec<u64>, out: &mut Vec<FiniteTopSpace>) {
        if current.len() == choices.len() {
            if let Ok(space) = FiniteTopSpace::new(current.clone()) {
                out.push(space);
            }
            return;
        }
        for &m in &choices[current.len()] {
            current.push(m);
            walk(choices, current, out);
            current.pop();
        }
    }
    walk(&choices, &mut current, &mut out);
    out
}

/// Regular operators for a discrete `X` of `m` points sitting as the
/// first points of every `k`-point space (`m < k ≤ n`) that induces the
/// discrete topology on them, together with the identities and a
/// product of two copies of the three-point example (carrier 9).
pub fn usco_catalogue(n: usize) -> Result<Vec<RegularOperator>> {
    let mut ops = Vec::new();
    for k in 1..=n {
        let spaces = all_spaces(k);
        ops.push(RegularOperator::identity(&FiniteTopSpace::discrete(k)?)?);
        for m in 1..k {
            let x = FiniteTopSpace::discrete(m)?;
            let inject: Vec<usize> = (0..m).collect();
            let found: Vec<Vec<RegularOperator>> = spaces
                .par_iter()
                .filter(|y| y.subspace(&inject).is_ok_and(|s| s == x))
                .map(|y| regular_operators(&x, y, &inject))
                .collect::<Result<_>>()?;
            ops.extend(found.into_iter().flatten());
        }
    }
    let e = three_point_example();
    ops.push(product_operator(&[e.clone(), e])?);
    Ok(ops)
}

fn usco_suite(ground: GroundSet, mut report: Report) -> Result<Report> {
    let ops = usco_catalogue(ground.len())?;
    let results: Vec<Vec<Failure>> = ops
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let label = |what: &str| format!("operator {i}: {what}");
            let mut local = Vec::new();
            let r = match usco_from_regular(e) {
                Ok(r) => r,
                Err(err) => {
                    local.push(Failure { check: label("usco"), witness: err.to_string() });
                    return local;
                }
            };
            if let Err(err) = r.check() {
                local.push(Failure { check: label("usco conditions"), witness: err.to_string() });
            }
            match regular_from_usco(&r) {
                Ok(back) => {
                    if let Err(v) = back.validate() {
                        local.push(Failure { check: label("round trip"), witness: v.to_string() });
                    }
                }
                Err(err) => local.push(Failure { check: label("round trip"), witness: err.to_string() }),
            }
            local
        })
        .collect();
    report.failures.extend(results.into_iter().flatten());
    report.checks_run = ops.len() as u64 * 2;
    Ok(report)
}

fn counts_suite(ground: GroundSet, mut report: Report) -> Result<Report> {
    let expected = count_mls_by_cliques(ground)?;
    let actual = count_mls(ground)?;
    report.expected = Some(expected);
    report.actual = Some(actual);
    report.checks_run = 1;
    if expected != actual {
        report.fail("count", format!("expected {expected}, enumerated {actual}"));
    }
    Ok(report)
}
