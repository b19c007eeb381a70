//! Named families and measures with string parameters.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::CliError;
use crate::analysis::controls::StickyKernel;
use crate::exact::Prob;
use crate::families::tree::Pendant;
use crate::families::{
    parse_stem, Causet, CausetRef, ChainPlusPoint, CrossedChains, DisjointChains, FiniteCauset, Grid, Growth, Ladder,
    Oscillating, PoissonOrder, RegularForest, TreeSpec,
};
use crate::measures::{
    derived_stem_measure, flow_measure, mixture_measure, mu_q, tree_measure, FlowSpec, LadderMeasure, MeasureRef,
    PointMass, UniformFinite, UrnMeasure,
};
use crate::poset::FinitePoset;

pub const FAMILIES: &[&str] = &[
    "ladder",
    "grid",
    "chains",
    "chain-plus-point",
    "forest",
    "oscillating",
    "crossed",
    "tree",
    "poisson",
];

pub const MEASURES: &[&str] = &[
    "ladder",
    "urn",
    "mu-q",
    "flow-chains",
    "flow-countable",
    "flow-split",
    "point-chain",
    "point-alternating",
    "mixture-q",
    "tree",
    "uniform",
    "sticky",
];

pub type Params = BTreeMap<String, String>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn get<'a>(p: &'a Params, key: &str) -> Option<&'a str> {
    p.get(key).map(String::as_str)
}

pub(crate) fn parse_u64(key: &str, s: &str) -> Result<u64, CliError> {
    s.trim().parse().map_err(|_| usage(format!("parameter {key}: `{s}` is not a non-negative integer")))
}

fn u64_param(p: &Params, key: &str, default: u64) -> Result<u64, CliError> {
    get(p, key).map_or(Ok(default), |s| parse_u64(key, s))
}

fn list_u64(key: &str, s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_u64(key, t)).collect()
}

/// `3`, `-2/7` or a terminating decimal such as `0.25`, exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let d: BigInt = d.trim().parse().ok()?;
        let n: BigInt = n.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let whole: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().ok()? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let part = BigRational::new(frac.parse().ok()?, scale);
        let mag = BigRational::from_integer(whole.clone()) + if neg || whole < BigInt::zero() { -part } else { part };
        return Some(mag);
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

fn rational_param(key: &str, s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).ok_or_else(|| usage(format!("parameter {key}: `{s}` is not a rational number")))
}

fn rational_list(key: &str, s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',').map(|t| rational_param(key, t)).collect()
}

fn f64_param(p: &Params, key: &str, default: f64) -> Result<f64, CliError> {
    match get(p, key) {
        None => Ok(default),
        Some(s) => s.trim().parse().map_err(|_| usage(format!("parameter {key}: `{s}` is not a number"))),
    }
}

fn pendant_shape(s: &str) -> Result<Pendant, CliError> {
    match s.split_once(':') {
        None if s == "leaf" => Ok(Pendant::leaf()),
        Some(("chain", k)) => {
            let k = parse_u64("pendant", k)? as usize;
            if k == 0 {
                return Err(usage("pendant chain needs at least one element"));
            }
            Ok(Pendant::chain(k))
        }
        _ => Err(usage(format!("pendant `{s}`: expected leaf or chain:K"))),
    }
}

/// Tree spec from `pendants=1,2` or `rule=every-level|powers-of-two|bare-chain`,
/// with an optional `pendant=leaf|chain:K` shape.
pub fn tree_spec(p: &Params) -> Result<TreeSpec, CliError> {
    let shape = pendant_shape(get(p, "pendant").unwrap_or("leaf"))?;
    match (get(p, "rule"), get(p, "pendants")) {
        (Some(_), Some(_)) => Err(usage("give either rule or pendants, not both")),
        (Some("every-level"), None) => Ok(TreeSpec::every_level(shape)),
        (Some("powers-of-two"), None) => Ok(TreeSpec::powers_of_two(shape)),
        (Some("bare-chain"), None) => Ok(TreeSpec::bare_chain()),
        (Some(r), None) => Err(usage(format!("unknown tree rule `{r}`"))),
        (None, levels) => {
            let levels = list_u64("pendants", levels.unwrap_or("1,2"))?;
            if levels.contains(&0) {
                return Err(usage("pendant levels start at 1"));
            }
            Ok(TreeSpec::listed(levels.into_iter().map(|l| (l, shape.clone())).collect()))
        }
    }
}

fn growth(s: &str) -> Result<Growth, CliError> {
    match s.split_once(':') {
        None if s == "double-exponential" => Ok(Growth::double_exponential()),
        Some(("listed", v)) => Ok(Growth::listed(list_u64("growth", v)?)),
        Some(("geometric", v)) => match list_u64("growth", v)?.as_slice() {
            [first, ratio] => Ok(Growth::geometric(*first, *ratio)),
            _ => Err(usage("geometric growth takes first,ratio")),
        },
        _ => Err(usage(format!("growth `{s}`: expected double-exponential, listed:M3,M4,... or geometric:FIRST,RATIO"))),
    }
}

fn forest(p: &Params) -> Result<RegularForest, CliError> {
    let roots = u64_param(p, "roots", 1)?;
    let branching = list_u64("branching", get(p, "branching").unwrap_or("2"))?;
    if roots == 0 || branching.is_empty() || branching.contains(&0) {
        return Err(usage("forest needs roots >= 1 and positive branching numbers"));
    }
    Ok(RegularForest::new(roots, branching))
}

fn chains(p: &Params) -> Result<DisjointChains, CliError> {
    match get(p, "k") {
        Some("inf") => Ok(DisjointChains::new(None)),
        _ => {
            let k = u64_param(p, "k", 2)?;
            if k == 0 {
                return Err(usage("k must be positive"));
            }
            Ok(DisjointChains::new(Some(k)))
        }
    }
}

pub fn family(name: &str, p: &Params, poset: Option<&FinitePoset>) -> Result<CausetRef, CliError> {
    Ok(match name {
        "ladder" => Arc::new(Ladder),
        "grid" => Arc::new(Grid),
        "chains" => Arc::new(chains(p)?),
        "chain-plus-point" => Arc::new(ChainPlusPoint),
        "forest" => Arc::new(forest(p)?),
        "oscillating" => Arc::new(Oscillating::new(growth(get(p, "growth").unwrap_or("listed:4,16,64,256"))?)),
        "crossed" => Arc::new(CrossedChains),
        "tree" => Arc::new(crate::families::DownTree::new(tree_spec(p)?)),
        "poisson" => Arc::new(
            PoissonOrder::sample(u64_param(p, "sample-seed", 1)?, f64_param(p, "intensity", 1.0)?, f64_param(p, "horizon", 4.0)?)
                .map_err(|e| CliError::Domain(e.to_string()))?,
        ),
        "file" => {
            let poset = poset.ok_or_else(|| usage("family `file` needs --poset"))?;
            Arc::new(FiniteCauset::new(poset.clone(), "file"))
        }
        other => return Err(usage(format!("unknown family `{other}`; known: {}", FAMILIES.join(", ")))),
    })
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

pub fn measure(name: &str, p: &Params, poset: Option<&FinitePoset>, tol: f64) -> Result<MeasureRef, CliError> {
    let domain = |e: crate::measures::MeasureError| CliError::Domain(e.to_string());
    let mu: MeasureRef = match name {
        "ladder" => Arc::new(LadderMeasure::new()),
        "urn" => Arc::new(UrnMeasure::new()),
        "mu-q" => {
            let q = get(p, "q").map_or(Ok(half()), |s| rational_param("q", s))?;
            Arc::new(mu_q(q).map_err(domain)?)
        }
        "flow-chains" => {
            let weights = rational_list("weights", get(p, "weights").unwrap_or("1/2,1/2"))?;
            let c = DisjointChains::new(Some(weights.len() as u64));
            Arc::new(flow_measure(FlowSpec::chains(c, weights), Arc::new(c)).map_err(domain)?)
        }
        "flow-countable" => {
            Arc::new(flow_measure(FlowSpec::countable_chains(), Arc::new(DisjointChains::new(None))).map_err(domain)?)
        }
        "flow-split" => {
            let f = forest(p)?;
            Arc::new(flow_measure(FlowSpec::equal_split(f.clone()), Arc::new(f)).map_err(domain)?)
        }
        "point-chain" => Arc::new(PointMass::chain_skipping_point()),
        "point-alternating" => Arc::new(PointMass::alternating()),
        "mixture-q" => {
            let qs = rational_list("qs", get(p, "qs").unwrap_or("1/5,4/5"))?;
            let ws = match get(p, "weights") {
                Some(s) => rational_list("weights", s)?,
                None => vec![BigRational::new(BigInt::one(), BigInt::from(qs.len())); qs.len()],
            };
            if ws.len() != qs.len() {
                return Err(usage("mixture-q needs as many weights as qs"));
            }
            let mut parts = Vec::new();
            for (q, w) in qs.into_iter().zip(ws) {
                parts.push((Arc::new(mu_q(q).map_err(domain)?) as MeasureRef, Prob::rational(w)));
            }
            Arc::new(mixture_measure(parts).map_err(domain)?)
        }
        "tree" => {
            let r = tree_measure(tree_spec(p)?, tol).map_err(domain)?;
            Arc::new(r.measure.ok_or_else(|| CliError::Domain("this tree admits no order-invariant measure".into()))?)
        }
        "uniform" => {
            let poset = poset.ok_or_else(|| usage("measure `uniform` needs --poset"))?;
            Arc::new(UniformFinite::new(poset.clone(), "file").map_err(domain)?)
        }
        "sticky" => Arc::new(StickyKernel::new()),
        other => return Err(usage(format!("unknown measure `{other}`; known: {}", MEASURES.join(", ")))),
    };
    match get(p, "derive") {
        None => Ok(mu),
        Some(s) => {
            let a = stem(mu.support().as_ref(), s)?;
            Ok(Arc::new(derived_stem_measure(mu, &a).map_err(domain)?))
        }
    }
}

/// Labels separated by whitespace, e.g. `a1 a2` or `(0,0) (1,0)`.
pub fn stem(o: &dyn Causet, s: &str) -> Result<Vec<crate::poset::ElementId>, CliError> {
    let labels: Vec<&str> = s.split_whitespace().collect();
    parse_stem(o, &labels).map_err(|e| CliError::Domain(e.to_string()))
}
