//! Scenario files: `{"kind", "payload", "seed"}`, where the payload names a
//! `check` and carries its inputs.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use growthlab::ad::{self, AdError, Emptiness, Scenario};
use growthlab::bell::{self, BellError, BellNode, CVerdict, PiPrefix, VVerdict};
use growthlab::budget::Budget;
use growthlab::cantor::{self, ClopenSet, PartialAssignment};
use growthlab::density;
use growthlab::kelley::{self, FiniteFamily};
use growthlab::rational::Rational;
use growthlab::report::{Check, Report, Verdict};
use growthlab::slalom::{self, GenExpr, OmegaPoint, Slalom};
use growthlab::suites::{self, DEFAULT_SEED};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl ScenarioError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Self::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Cantor,
    Density,
    Ad,
    Slalom,
    Kelley,
    Bell,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Cantor => "cantor",
            Kind::Density => "density",
            Kind::Ad => "ad",
            Kind::Slalom => "slalom",
            Kind::Kelley => "kelley",
            Kind::Bell => "bell",
        }
    }

    fn checks(self) -> &'static [&'static str] {
        match self {
            Kind::Cantor => &["measure", "product"],
            Kind::Density => &["transfer"],
            Kind::Ad => &["positive", "emptiness"],
            Kind::Slalom => &["infinite", "cl2", "diagonal"],
            Kind::Kelley => &["kappa", "fragmentation"],
            Kind::Bell => &["taylor", "iso", "positivity", "ladder"],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub kind: Kind,
    pub payload: Map<String, Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn schema_error<E: std::fmt::Display>(prefix: &str, e: serde_path_to_error::Error<E>) -> ScenarioError {
    let inner = e.path().to_string();
    let path = if inner == "." { prefix.to_string() } else { format!("{prefix}.{inner}") };
    ScenarioError::Schema { path, message: e.into_inner().to_string() }
}

pub fn parse(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| schema_error("$", e))
}

fn payload<T: DeserializeOwned>(mut map: Map<String, Value>) -> Result<T, ScenarioError> {
    map.remove("check");
    serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| schema_error("$.payload", e))
}

mod rat {
    pub use growthlab::rational::serde_str::deserialize;

    pub mod opt {
        use growthlab::rational::{self, Rational};
        use serde::{Deserialize, Deserializer};

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| rational::parse(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

pub fn run(file: ScenarioFile, budget: &Budget) -> Result<Report, ScenarioError> {
    let seed = file.seed.unwrap_or(DEFAULT_SEED);
    let check = match file.payload.get("check") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            return Err(ScenarioError::Schema { path: "$.payload.check".into(), message: "expected a string".into() })
        }
        None => return Err(ScenarioError::Schema { path: "$.payload".into(), message: "missing field `check`".into() }),
    };
    if !file.kind.checks().contains(&check.as_str()) {
        return Err(ScenarioError::Schema {
            path: "$.payload.check".into(),
            message: format!("unknown check {check:?} for kind {}, expected one of {:?}", file.kind.as_str(), file.kind.checks()),
        });
    }
    let p = file.payload;
    let checks = match (file.kind, check.as_str()) {
        (Kind::Cantor, "measure") => cantor_measure(payload(p)?),
        (Kind::Cantor, "product") => cantor_product(payload(p)?),
        (Kind::Density, "transfer") => density_transfer(payload(p)?)?,
        (Kind::Ad, "positive") => ad_positive(payload(p)?)?,
        (Kind::Ad, "emptiness") => ad_emptiness(payload(p)?)?,
        (Kind::Slalom, "infinite") => slalom_infinite(payload(p)?)?,
        (Kind::Slalom, "cl2") => slalom_cl2(payload(p)?, seed, budget)?,
        (Kind::Slalom, "diagonal") => slalom_diagonal(payload(p)?),
        (Kind::Kelley, "kappa") => kelley_kappa(payload(p)?, budget)?,
        (Kind::Kelley, "fragmentation") => kelley_fragmentation(payload(p)?)?,
        (Kind::Bell, "taylor") => bell_taylor(payload(p)?),
        (Kind::Bell, "iso") => bell_iso(payload(p)?, budget)?,
        (Kind::Bell, "positivity") => bell_positivity(payload(p)?)?,
        (Kind::Bell, "ladder") => bell_ladder(payload(p)?)?,
        _ => unreachable!("checked against the kind's list"),
    };
    Ok(Report::new(format!("{}/{check}", file.kind.as_str()), seed, checks))
}

fn expectation(name: &str, expected: Option<&Rational>, actual: &Rational) -> Check {
    match expected {
        None => Check::new(name, Verdict::Pass).value("actual", actual),
        Some(e) => Check::pass_if(name, e == actual).value("actual", actual).value("expected", e),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CantorMeasure {
    set: ClopenSet,
    #[serde(default, with = "rat::opt")]
    expect: Option<Rational>,
}

fn cantor_measure(p: CantorMeasure) -> Vec<Check> {
    let mut c = expectation("measure", p.expect.as_ref(), &p.set.measure());
    if let Ok(support) = p.set.support() {
        c = c.count("support_size", support.len() as u64).witness(support);
    }
    vec![c]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Pair {
    a: ClopenSet,
    b: ClopenSet,
}

fn cantor_product(p: Pair) -> Vec<Check> {
    let (ma, mb) = (p.a.measure(), p.b.measure());
    let c = match cantor::product_measure_check(&p.a, &p.b) {
        Ok(joint) => Check::new("product rule on disjoint supports", Verdict::Pass).value("joint", &joint),
        Err(e @ cantor::CantorError::ProductRuleViolated { .. }) => {
            Check::new("product rule on disjoint supports", Verdict::Fail).note("error", e.to_string())
        }
        Err(e) => Check::new("product rule on disjoint supports", Verdict::Unknown).note("error", e.to_string()),
    };
    vec![c.value("measure_a", &ma).value("measure_b", &mb)]
}

fn density_transfer(p: Pair) -> Result<Vec<Check>, ScenarioError> {
    let r = density::transfer_check(&p.a, &p.b).map_err(ScenarioError::invalid)?;
    let mut checks: Vec<Check> =
        r.checks.into_iter().map(|l| Check::pass_if(l.law, l.holds).note("detail", l.detail)).collect();
    for (name, set) in [("a", &p.a), ("b", &p.b)] {
        checks.push(Check::new(format!("measure of {name}"), Verdict::Pass).value("measure", &set.measure()));
    }
    Ok(checks)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdPositive {
    scenario: Scenario,
    alphas: Vec<String>,
    #[serde(default)]
    tau: PartialAssignment,
    #[serde(default = "default_levels")]
    levels: usize,
}

fn default_levels() -> usize {
    3
}

fn ad_positive(p: AdPositive) -> Result<Vec<Check>, ScenarioError> {
    let alphas: Vec<&str> = p.alphas.iter().map(String::as_str).collect();
    let pb = match ad::positive_lower_bound(&p.scenario, &alphas, &p.tau) {
        Ok(pb) => pb,
        Err(e @ AdError::InsufficientPrefix(_)) => {
            return Ok(vec![Check::new("lower bound", Verdict::Unknown).note("reason", e.to_string())])
        }
        Err(e) => return Err(ScenarioError::invalid(e)),
    };
    let mut checks = vec![Check::new("lower bound", Verdict::Pass)
        .count("N", pb.n as u64)
        .count("m", pb.m as u64)
        .value("core_measure", &pb.core_measure)
        .value("bound", &pb.bound)];
    for n in pb.n..=pb.n + p.levels {
        let c = match ad::residual(&p.scenario, &alphas, &p.tau, n) {
            Ok(r) => {
                let mu = r.measure();
                Check::pass_if(format!("residual at level {n} above the bound"), mu > pb.bound).value("residual", &mu)
            }
            Err(e) => Check::new(format!("residual at level {n}"), Verdict::Unknown).note("reason", e.to_string()),
        };
        checks.push(c);
    }
    Ok(checks)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdEmptiness {
    scenario: Scenario,
    set: ClopenSet,
    #[serde(default)]
    betas: Vec<String>,
    #[serde(default)]
    alphas: Vec<String>,
    depth: usize,
    #[serde(default)]
    expect_empty: Option<bool>,
}

fn ad_emptiness(p: AdEmptiness) -> Result<Vec<Check>, ScenarioError> {
    let betas: Vec<&str> = p.betas.iter().map(String::as_str).collect();
    let alphas: Vec<&str> = p.alphas.iter().map(String::as_str).collect();
    let out = ad::emptiness_decide(&p.set, &betas, &alphas, &p.scenario, p.depth);
    let empty = match &out.result {
        Emptiness::Empty => Some(true),
        Emptiness::Nonempty { .. } => Some(false),
        Emptiness::Unknown { .. } => None,
    };
    let verdict = match (empty, p.expect_empty) {
        (None, _) => Verdict::Unknown,
        (Some(e), Some(x)) => Verdict::from_bool(e == x),
        (Some(_), None) => Verdict::Pass,
    };
    Ok(vec![Check::new("emptiness", verdict).count("strip_steps", out.steps.len() as u64).witness(&out)])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlalomInfinite {
    expr: GenExpr,
    #[serde(default)]
    expect_infinite: Option<bool>,
    #[serde(default)]
    count_to: Option<u32>,
}

fn slalom_infinite(p: SlalomInfinite) -> Result<Vec<Check>, ScenarioError> {
    let inf = match slalom::is_infinite(&p.expr) {
        Ok(b) => b,
        Err(e @ slalom::SlalomError::ExpressionTooLarge) => {
            return Ok(vec![Check::new("infinite", Verdict::Unknown).note("reason", e.to_string())])
        }
        Err(e) => return Err(ScenarioError::invalid(e)),
    };
    let verdict = p.expect_infinite.map_or(Verdict::Pass, |x| Verdict::from_bool(x == inf));
    let mut checks = vec![Check::new("infinite", verdict).note("infinite", inf.to_string())];
    if let Some(h) = p.count_to {
        let counts = slalom::member_counts(&p.expr, h).map_err(ScenarioError::invalid)?;
        let mut c = Check::new("members by height", Verdict::Pass);
        for (m, n) in counts.iter().enumerate() {
            c = c.count(&format!("height_{m}"), *n as u64);
        }
        checks.push(c);
    }
    Ok(checks)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlalomCl2 {
    #[serde(default)]
    class: Option<OmegaPoint>,
    #[serde(default)]
    vs: Vec<Slalom>,
    #[serde(deserialize_with = "rat::deserialize")]
    delta: Rational,
    /// Seeded random class members added to `vs`.
    #[serde(default)]
    samples: usize,
}

fn slalom_cl2(p: SlalomCl2, seed: u64, budget: &Budget) -> Result<Vec<Check>, ScenarioError> {
    let class = match (&p.class, p.vs.first()) {
        (Some(c), _) => c.clone(),
        (None, Some(v)) => slalom::w_delta_class(v, &p.delta).map_err(ScenarioError::invalid)?,
        (None, None) => return Err(ScenarioError::Invalid("either `class` or a nonempty `vs` is needed".into())),
    };
    let mut vs = p.vs;
    vs.extend(suites::sample_class_members(seed, &class, &p.delta, p.samples).map_err(ScenarioError::invalid)?);
    if vs.is_empty() {
        return Err(ScenarioError::Invalid("no slaloms: give `vs` or `samples`".into()));
    }
    let mut checks = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        let aw = slalom::a_w_measure(v, class.height());
        checks.push(
            Check::pass_if(format!("V{i}: escape measure above δ"), aw.exact > p.delta)
                .value("exact", &aw.exact)
                .value("union_bound", &aw.union_bound)
                .witness(v),
        );
    }
    let w = slalom::cl2_witness(&vs, &class, &p.delta).map_err(ScenarioError::invalid)?;
    checks.push(
        Check::pass_if("subfamily of size at least δk with infinite intersection", w.bound_met && w.infinite)
            .count("k", vs.len() as u64)
            .count("chosen", w.indices.len() as u64)
            .value("expectation", &w.expectation)
            .value("delta", &p.delta)
            .witness(&w),
    );
    let fam = slalom::class_atomization(&vs, &class, budget.subsets).map_err(ScenarioError::invalid)?;
    let kappa = kelley::kappa_lp(&fam).map_err(ScenarioError::invalid)?;
    checks.push(
        Check::pass_if("intersection number above δ", kappa.value > p.delta)
            .value("kappa", &kappa.value)
            .witness(&kappa),
    );
    Ok(checks)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlalomDiagonal {
    wns: Vec<Slalom>,
    #[serde(default)]
    h: u32,
}

fn slalom_diagonal(p: SlalomDiagonal) -> Vec<Check> {
    let f = slalom::diagonal_escape(&p.wns, p.h);
    let caught = p.wns.iter().enumerate().filter(|(i, w)| w.get(*i as u32 + 1).is_some_and(|s| s.contains(&f[i + 1]))).count();
    vec![Check::tally("f(n) escapes W_n(n)", p.wns.len() as u64, caught as u64).witness(f)]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KelleyKappa {
    family: FiniteFamily,
    #[serde(default = "default_max_len")]
    max_len: usize,
}

fn default_max_len() -> usize {
    12
}

fn kelley_kappa(p: KelleyKappa, budget: &Budget) -> Result<Vec<Check>, ScenarioError> {
    let lp = kelley::kappa_lp(&p.family).map_err(ScenarioError::invalid)?;
    let verified = lp.verify(&p.family).map_err(ScenarioError::invalid)?;
    let mut checks = vec![Check::pass_if("certificate verifies", verified).value("kappa", &lp.value).witness(&lp)];
    match kelley::kappa_upper_bounds_with_guard(&p.family, p.max_len, budget.subsets) {
        Ok(ub) => {
            let last = ub.last().expect("max_len ≥ 1").clone();
            let mut c = Check::pass_if("LP value equals the sequence bound", last == lp.value)
                .value("kappa", &lp.value)
                .value("upper_bound", &last);
            for (l, u) in ub.iter().enumerate() {
                c = c.value(&format!("len_{:02}", l + 1), u);
            }
            checks.push(c);
        }
        Err(kelley::KelleyError::SequenceTooLong { needed, guard }) => checks.push(
            Check::new("LP value equals the sequence bound", Verdict::Unknown)
                .count("needed", needed)
                .count("guard", guard),
        ),
        Err(e) => return Err(ScenarioError::invalid(e)),
    }
    Ok(checks)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KelleyFragmentation {
    families: Vec<FiniteFamily>,
    #[serde(deserialize_with = "rat::deserialize")]
    delta: Rational,
}

fn kelley_fragmentation(p: KelleyFragmentation) -> Result<Vec<Check>, ScenarioError> {
    let r = kelley::fragmentation_report(&p.families, &p.delta).map_err(ScenarioError::invalid)?;
    Ok(r.rows
        .iter()
        .map(|row| Check::pass_if(format!("piece {}: κ above δ", row.index), row.passed).value("kappa", &row.value))
        .collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BellTaylor {
    m_max: u32,
    n_max: u32,
}

fn bell_taylor(p: BellTaylor) -> Vec<Check> {
    let mut checks = Vec::new();
    for m in 1..=p.m_max {
        for n in 3 * m + 1..=p.n_max {
            let t = bell::taylor_check(m, n);
            checks.push(
                Check::pass_if(format!("m={m} n={n}"), t.holds)
                    .value("lhs_upper", &t.lhs_upper)
                    .value("rhs", &t.rhs)
                    .count("terms_to", t.terms_to as u64),
            );
        }
    }
    checks
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BellIso {
    #[serde(default)]
    s: BellNode,
    #[serde(default)]
    pos: Vec<PiPrefix>,
    #[serde(default)]
    neg: Vec<PiPrefix>,
}

fn bell_iso(p: BellIso, budget: &Budget) -> Result<Vec<Check>, ScenarioError> {
    let r = match bell::iso_condition_check(&p.s, &p.pos, &p.neg, budget.nodes) {
        Ok(r) => r,
        Err(e @ BellError::DepthGuard { .. }) => {
            return Ok(vec![Check::new("deciders agree", Verdict::Unknown).note("reason", e.to_string())])
        }
        Err(e) => return Err(ScenarioError::invalid(e)),
    };
    let infinite = !matches!(r.c_side, CVerdict::Finite);
    let nonempty = !matches!(r.v_side, VVerdict::Empty);
    let mut checks = vec![Check::pass_if("deciders agree", r.consistent)
        .note("c_side_infinite", infinite.to_string())
        .note("v_side_nonempty", nonempty.to_string())
        .witness(json!({"c_side": r.c_side, "v_side": r.v_side}))];
    checks.push(match (r.sweep, r.sweep_agrees) {
        (Some(sw), Some(agrees)) => Check::pass_if("sweep agrees", agrees)
            .count("depth", sw.depth as u64)
            .count("nodes", sw.nodes)
            .count("in_d", sw.in_d)
            .count("in_residual", sw.in_residual),
        _ => Check::new("sweep agrees", Verdict::Unknown).note("reason", "sweep exceeds the node budget"),
    });
    Ok(checks)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BellPositivity {
    #[serde(default)]
    s: BellNode,
    pis: Vec<PiPrefix>,
    n: usize,
}

fn bell_positivity(p: BellPositivity) -> Result<Vec<Check>, ScenarioError> {
    let r = bell::strict_positivity_check(&p.s, &p.pis, p.n).map_err(ScenarioError::invalid)?;
    Ok(vec![
        Check::pass_if("gap is positive", r.gap > Rational::from_integer(0.into()))
            .value("basic", &r.basic)
            .value("covered", &r.covered)
            .value("tail", &r.tail)
            .value("gap", &r.gap),
        Check::pass_if("mass outside A_n", r.duzo_holds)
            .value("outside", &r.outside_a_n)
            .value("bound", &r.outside_a_n_bound),
        Check::pass_if("ladder", r.ladder.iter().all(|l| l.holds)).witness(&r.ladder),
        Check::pass_if("factorial tail", r.taylor.holds)
            .value("lhs_upper", &r.taylor.lhs_upper)
            .value("rhs", &r.taylor.rhs),
        Check::new("witness node", Verdict::Pass).witness(&r.witness),
    ])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BellLadder {
    pis: Vec<PiPrefix>,
}

fn bell_ladder(p: BellLadder) -> Result<Vec<Check>, ScenarioError> {
    if p.pis.is_empty() {
        return Err(ScenarioError::Invalid("`pis` must be nonempty".into()));
    }
    Ok(bell::malo_ladder(&p.pis)
        .iter()
        .map(|l| Check::pass_if(format!("step {}", l.l), l.holds).value("measure", &l.measure).value("bound", &l.bound))
        .collect())
}

/// Field summary of every scenario kind, for `describe`.
pub fn describe() -> Value {
    json!({
        "scenario": {"kind": "one of cantor, density, ad, slalom, kelley, bell", "payload": "object with a `check` field", "seed": "optional integer"},
        "rationals": "strings \"p/q\" or \"p\"",
        "encodings": {
            "partial_assignment": "{\"<coord>\": 0|1}",
            "clopen_set": "[partial_assignment] (union of cylinders)",
            "ad_scenario": "{\"points\": {label: [\"0110…\"]}, \"family\": {label: [increasing coords]}, \"ad_bound\": n}",
            "slalom": "{\"levels\": {\"k\": [slots below 2^k]}}",
            "omega_point": "{\"slalom\": slalom, \"n\": height above the support}",
            "gen_expr": "{\"const\": bool} | {\"posT\": slalom} | {\"height\": omega_point} | {\"and\": [..]} | {\"or\": [..]} | {\"not\": expr}",
            "finite_family": "{\"atoms\": [names], \"sets\": [[names]]}",
            "bell_node": "[entries, entry i at most i+1]",
            "pi_prefix": "{\"rows\": [node of length 1, node of length 2, …]}"
        },
        "checks": {
            "cantor": {"measure": {"set": "clopen_set", "expect?": "rational"}, "product": {"a": "clopen_set", "b": "clopen_set"}},
            "density": {"transfer": {"a": "clopen_set", "b": "clopen_set"}},
            "ad": {
                "positive": {"scenario": "ad_scenario", "alphas": "[label]", "tau?": "partial_assignment", "levels?": "integer, default 3"},
                "emptiness": {"scenario": "ad_scenario", "set": "clopen_set", "betas?": "[label]", "alphas?": "[label]", "depth": "integer", "expect_empty?": "bool"}
            },
            "slalom": {
                "infinite": {"expr": "gen_expr", "expect_infinite?": "bool", "count_to?": "height ≤ 4"},
                "cl2": {"class?": "omega_point", "vs?": "[slalom]", "delta": "rational in (0,1)", "samples?": "integer, seeded"},
                "diagonal": {"wns": "[slalom], W_1 first", "h?": "integer"}
            },
            "kelley": {
                "kappa": {"family": "finite_family", "max_len?": "integer, default 12"},
                "fragmentation": {"families": "[finite_family]", "delta": "rational"}
            },
            "bell": {
                "taylor": {"m_max": "integer", "n_max": "integer"},
                "iso": {"s?": "bell_node", "pos?": "[pi_prefix]", "neg?": "[pi_prefix]"},
                "positivity": {"s?": "bell_node", "pis": "[pi_prefix]", "n": "integer"},
                "ladder": {"pis": "[pi_prefix]"}
            }
        },
        "suites": suites::SUITES,
        "exit_codes": {"0": "all checks pass", "1": "some check fails", "2": "no failure, some unknown", "3": "usage or schema error"}
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_errors_carry_paths() {
        let f = parse(r#"{"kind": "cantor", "payload": {"check": "measure", "set": [{"0": 2}]}}"#).unwrap();
        match run(f, &Budget::default()) {
            Err(ScenarioError::Schema { path, .. }) => assert!(path.starts_with("$.payload.set"), "{path}"),
            other => panic!("{other:?}"),
        }
        match parse(r#"{"kind": "nope", "payload": {}}"#) {
            Err(ScenarioError::Schema { path, .. }) => assert_eq!(path, "$.kind"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_check_is_schema_error() {
        let f = parse(r#"{"kind": "bell", "payload": {"check": "nope"}}"#).unwrap();
        assert!(matches!(run(f, &Budget::default()), Err(ScenarioError::Schema { .. })));
    }

    #[test]
    fn cantor_measure_expectation() {
        let f = parse(r#"{"kind": "cantor", "payload": {"check": "measure", "set": [{"0": 1}, {"1": 1}], "expect": "3/4"}}"#)
            .unwrap();
        let r = run(f, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.checks[0].values["actual"], "3/4");
    }
}
