//! Mechanical refutation of candidate homogeneous one-point extensions of
//! the level-0 limit.
//!
//! Given a base `x`, a type `τ` of a virtual point `t` over `x` and a
//! strategy answering for `t`, [`refute`] realizes the type of `t` at a fresh
//! point `t1`, realizes it again at `t2` with `c(t1, t2) = c(t, t1)`, and
//! exhibits the partial isomorphism fixing `x` and sending `t1` to `t2`. A
//! strategy either colors `{t, t1, t2}` monochromatically or answers
//! differently on `t1` and `t2`. The resulting certificate is re-checked by
//! [`check_certificate`] from scratch.

mod certificate;
mod control;
pub mod strategy;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::color::ColorTerm;
use crate::error::{LimitError, TypeError};
use crate::limit::{Approximation, NamedType, PartialIso};
use crate::structure::{validate, FinStruct};
use crate::types::{type_of_point, OnePointType};

pub use certificate::{mutants, parse_certificate, write_certificate};
pub use control::{control_lo, ControlReport};
pub use strategy::{
    battery, strategy_by_name, Answer, ExtensionStrategy, QueryContext, Side, StrategyError,
};

/// Why a strategy's answers cannot describe any point `t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Inconsistency {
    /// The answer on a support point differs from the prescribed type.
    SupportMismatch(String),
    /// The color lies outside the level-0 class.
    ColorOutsideClass(String),
    /// `t` is claimed below the first point and above the second, which is
    /// greater.
    NotACut(String, String),
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconsistency::SupportMismatch(p) => write!(f, "support-mismatch {p}"),
            Inconsistency::ColorOutsideClass(p) => write!(f, "color-outside-class {p}"),
            Inconsistency::NotACut(a, b) => write!(f, "not-a-cut {a} {b}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// `{t, a, b}` is monochromatic in `color`.
    MonochromaticTriangle {
        others: (String, String),
        color: ColorTerm,
    },
    /// The answers on `t1` and `t2` differ although `α` maps one to the other.
    EquivarianceViolation { first: Answer, second: Answer },
    StrategyInconsistent(Inconsistency),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::MonochromaticTriangle { .. } => "monochromatic-triangle",
            Verdict::EquivarianceViolation { .. } => "equivariance-violation",
            Verdict::StrategyInconsistent(_) => "strategy-inconsistent",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forth,
    Back,
}

/// One back-and-forth step: the pair `(from, to)` added to `α`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    pub direction: Direction,
    pub from: String,
    pub to: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RefutationCertificate {
    pub strategy: String,
    /// The final approximation.
    pub structure: FinStruct,
    pub created: Vec<String>,
    /// The base `x`, whose points are named as in `structure`.
    pub base: FinStruct,
    /// The prescribed type of `t` over `base`.
    pub target: OnePointType,
    pub t1: Option<String>,
    pub t2: Option<String>,
    pub alpha: PartialIso,
    pub depth: usize,
    /// Strategy answers in query order.
    pub answers: Vec<(String, Answer)>,
    pub steps: Vec<Step>,
    pub verdict: Verdict,
}

impl RefutationCertificate {
    pub fn answer(&self, point: &str) -> Option<&Answer> {
        self.answers.iter().find(|(p, _)| p == point).map(|(_, a)| a)
    }
}

#[derive(Debug, Error)]
pub enum RefuteError {
    #[error("base must be a valid level-0 structure")]
    BadBase,
    #[error("type: {0}")]
    BadType(#[from] TypeError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// Reason code for a rejected certificate.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum Rejection {
    #[error("structure is not a valid level-0 structure")]
    InvalidStructure,
    #[error("creation order does not list the structure's points")]
    BadCreationOrder,
    #[error("base is not valid or not a substructure")]
    BaseNotSubstructure,
    #[error("type does not fit the base")]
    BadType,
    #[error("strategy mismatch: {0}")]
    Strategy(String),
    #[error("recorded answer for `{0}` differs from the strategy")]
    ReplayMismatch(String),
    #[error("point `{0}` answered twice")]
    DuplicateAnswer(String),
    #[error("missing answer for `{0}`")]
    MissingAnswer(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("`{0}` does not realize the full type of t over the base")]
    TypeNotRealized(String),
    #[error("c(t1, t2) differs from the answer on t1")]
    WrongBridgeColor,
    #[error("partial isomorphism: {0}")]
    Alpha(String),
    #[error("transcript: {0}")]
    Transcript(String),
    #[error("verdict: {0}")]
    Verdict(String),
}

/// First inconsistency introduced by `answers[k]` against the earlier ones.
fn inconsistency_at(
    structure: &FinStruct,
    created: &[String],
    base: &FinStruct,
    target: &OnePointType,
    answers: &[(String, Answer)],
    k: usize,
) -> Option<Inconsistency> {
    let (point, answer) = &answers[k];
    let ctx = QueryContext {
        structure,
        created,
        base,
        target,
        point,
    };
    if let Some(forced) = ctx.forced() {
        if &forced != answer {
            return Some(Inconsistency::SupportMismatch(point.clone()));
        }
    }
    if answer.color.level() != 0 {
        return Some(Inconsistency::ColorOutsideClass(point.clone()));
    }
    let pos = structure.position(point)?;
    for (other, a) in &answers[..k] {
        let op = structure.position(other)?;
        if op < pos && a.side == Side::Below && answer.side == Side::Above {
            return Some(Inconsistency::NotACut(other.clone(), point.clone()));
        }
        if op > pos && answer.side == Side::Below && a.side == Side::Above {
            return Some(Inconsistency::NotACut(point.clone(), other.clone()));
        }
    }
    None
}

/// Full type of `t` over the base read from the answers, with base
/// positions as support.
fn full_type(base: &FinStruct, answers: &[(String, Answer)]) -> Option<OnePointType> {
    let lookup: HashMap<&str, &Answer> = answers.iter().map(|(p, a)| (p.as_str(), a)).collect();
    let colors = base
        .points()
        .iter()
        .map(|p| lookup.get(p.as_str()).map(|a| a.color.clone()))
        .collect::<Option<Vec<_>>>()?;
    let cut = base
        .points()
        .iter()
        .filter(|p| lookup[p.as_str()].side == Side::Above)
        .count();
    Some(OnePointType {
        support: (0..base.len()).collect(),
        cut,
        colors,
        level: 0,
    })
}

struct Session<'a> {
    approx: Approximation,
    base: &'a FinStruct,
    target: &'a OnePointType,
    strategy: &'a mut dyn ExtensionStrategy,
    answers: Vec<(String, Answer)>,
}

impl Session<'_> {
    /// Queries `point` and reports the first inconsistency it introduces.
    fn ask(&mut self, point: &str) -> Result<(Answer, Option<Inconsistency>), StrategyError> {
        if let Some((_, a)) = self.answers.iter().find(|(p, _)| p == point) {
            return Ok((a.clone(), None));
        }
        let ctx = QueryContext {
            structure: self.approx.current(),
            created: self.approx.created(),
            base: self.base,
            target: self.target,
            point,
        };
        let answer = self.strategy.query(&ctx)?;
        self.answers.push((point.to_string(), answer.clone()));
        let k = self.answers.len() - 1;
        let bad = inconsistency_at(
            self.approx.current(),
            self.approx.created(),
            self.base,
            self.target,
            &self.answers,
            k,
        );
        Ok((answer, bad))
    }

    fn finish(
        self,
        depth: usize,
        t1: Option<String>,
        t2: Option<String>,
        alpha: PartialIso,
        steps: Vec<Step>,
        verdict: Verdict,
    ) -> RefutationCertificate {
        RefutationCertificate {
            strategy: self.strategy.name(),
            structure: self.approx.current().clone(),
            created: self.approx.created().to_vec(),
            base: self.base.clone(),
            target: self.target.clone(),
            t1,
            t2,
            alpha,
            depth,
            answers: self.answers,
            steps,
            verdict,
        }
    }
}

fn ordered(s: &FinStruct, a: &str, b: &str) -> (String, String) {
    if s.position(a) < s.position(b) {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Runs the refutation procedure against `strategy`, extending the witness
/// partial isomorphism by `depth` alternating back-and-forth steps.
///
/// The strategy is first asked about every base point, which fixes the full
/// type `τ*` of `t` over the base; `t1` and `t2` both realize `τ*`.
pub fn refute(
    x: &FinStruct,
    tau: &OnePointType,
    strategy: &mut dyn ExtensionStrategy,
    depth: usize,
) -> Result<RefutationCertificate, RefuteError> {
    if x.level() != 0 || !validate(x).is_valid() {
        return Err(RefuteError::BadBase);
    }
    tau.check(x)?;
    if tau.level != 0 {
        return Err(RefuteError::BadType(TypeError::ColorAboveLevel(format!(
            "level={}",
            tau.level
        ))));
    }
    let mut s = Session {
        approx: Approximation::from_seed(x)?,
        base: x,
        target: tau,
        strategy,
        answers: Vec::new(),
    };
    let none = PartialIso::default();

    for p in x.points() {
        if let (_, Some(bad)) = s.ask(p)? {
            return Ok(s.finish(depth, None, None, none, vec![], Verdict::StrategyInconsistent(bad)));
        }
    }
    let full = full_type(x, &s.answers).expect("all base points answered");
    for a in 0..x.len() {
        for b in a + 1..x.len() {
            let c = &full.colors[a];
            if *c == full.colors[b] && c == x.color(a, b) {
                let verdict = Verdict::MonochromaticTriangle {
                    others: (x.point(a).to_string(), x.point(b).to_string()),
                    color: c.clone(),
                };
                return Ok(s.finish(depth, None, None, none, vec![], verdict));
            }
        }
    }

    // (i) t1 realizes the full type, q is its answer
    let names: Vec<String> = x.points().to_vec();
    let t1 = s.approx.realize_fresh(&NamedType {
        support: names.clone(),
        cut: full.cut,
        colors: full.colors.clone(),
    })?;
    let (first, bad) = s.ask(&t1)?;
    if let Some(bad) = bad {
        return Ok(s.finish(depth, Some(t1), None, none, vec![], Verdict::StrategyInconsistent(bad)));
    }
    let q = first.color.clone();
    if let Some(v) = (0..x.len()).find(|&v| full.colors[v] == q) {
        let verdict = Verdict::MonochromaticTriangle {
            others: ordered(s.approx.current(), x.point(v), &t1),
            color: q,
        };
        return Ok(s.finish(depth, Some(t1), None, none, vec![], verdict));
    }

    // (ii) t2 realizes the full type and sees t1 in color q, just above it
    let g = full.cut;
    let mut support = names.clone();
    support.insert(g, t1.clone());
    let mut colors = full.colors.clone();
    colors.insert(g, q.clone());
    let t2 = s.approx.realize_fresh(&NamedType {
        support,
        cut: g + 1,
        colors,
    })?;

    // (iii) α = id_x ∪ {t1 ↦ t2}, then back and forth
    let mut alpha = PartialIso::identity(names.iter().map(String::as_str));
    alpha.pairs.push((t1.clone(), t2.clone()));
    if !alpha.is_valid(s.approx.current()) {
        return Err(RefuteError::Limit(LimitError::NotPartialIso));
    }
    let mut steps = Vec::with_capacity(depth);
    for k in 0..depth {
        let direction = if k % 2 == 0 {
            Direction::Forth
        } else {
            Direction::Back
        };
        let taken: BTreeSet<&str> = alpha
            .pairs
            .iter()
            .map(|(a, b)| if direction == Direction::Forth { a } else { b }.as_str())
            .collect();
        let next = s
            .approx
            .current()
            .points()
            .iter()
            .find(|p| !taken.contains(p.as_str()))
            .cloned();
        let point = match next {
            Some(p) => p,
            None => s.approx.realize_fresh(&NamedType {
                support: vec![],
                cut: 0,
                colors: vec![],
            })?,
        };
        alpha = match direction {
            Direction::Forth => s.approx.extend_partial_iso(&alpha, &point)?,
            Direction::Back => s.approx.extend_partial_iso_back(&alpha, &point)?,
        };
        let (from, to) = alpha.pairs.last().expect("just extended").clone();
        steps.push(Step {
            direction,
            from,
            to,
        });
    }

    // (iv) compare with the answer on t2
    let (second, bad) = s.ask(&t2)?;
    let verdict = if let Some(bad) = bad {
        Verdict::StrategyInconsistent(bad)
    } else if second == first {
        Verdict::MonochromaticTriangle {
            others: (t1.clone(), t2.clone()),
            color: q,
        }
    } else {
        Verdict::EquivarianceViolation { first, second }
    };
    Ok(s.finish(depth, Some(t1), Some(t2), alpha, steps, verdict))
}

/// Re-verifies a certificate against a fresh instance of its strategy,
/// replaying the recorded queries in order.
pub fn check_certificate(
    cert: &RefutationCertificate,
    strategy: &mut dyn ExtensionStrategy,
) -> Result<(), Rejection> {
    let st = &cert.structure;
    if st.level() != 0 || !validate(st).is_valid() {
        return Err(Rejection::InvalidStructure);
    }
    let listed: BTreeSet<&String> = cert.created.iter().collect();
    let known: BTreeSet<&String> = st.points().iter().collect();
    if listed != known || cert.created.len() != st.len() {
        return Err(Rejection::BadCreationOrder);
    }
    check_base(cert)?;
    if cert.target.level != 0 || cert.target.check(&cert.base).is_err() {
        return Err(Rejection::BadType);
    }
    if strategy.name() != cert.strategy {
        return Err(Rejection::Strategy(format!(
            "certificate names `{}`, checking with `{}`",
            cert.strategy,
            strategy.name()
        )));
    }

    // replay
    let mut seen = BTreeSet::new();
    for (k, (point, answer)) in cert.answers.iter().enumerate() {
        if st.position(point).is_none() {
            return Err(Rejection::UnknownPoint(point.clone()));
        }
        if !seen.insert(point) {
            return Err(Rejection::DuplicateAnswer(point.clone()));
        }
        let ctx = QueryContext {
            structure: st,
            created: &cert.created,
            base: &cert.base,
            target: &cert.target,
            point,
        };
        let got = strategy
            .query(&ctx)
            .map_err(|e| Rejection::Strategy(e.to_string()))?;
        if &got != answer {
            return Err(Rejection::ReplayMismatch(point.clone()));
        }
        let bad = inconsistency_at(st, &cert.created, &cert.base, &cert.target, &cert.answers, k);
        if let Some(bad) = bad {
            return match &cert.verdict {
                Verdict::StrategyInconsistent(claimed) if *claimed == bad => {
                    if k + 1 == cert.answers.len() {
                        check_stage(cert)
                    } else {
                        Err(Rejection::Verdict("answers continue after the inconsistency".into()))
                    }
                }
                _ => Err(Rejection::Verdict(format!("first inconsistency is `{bad}`"))),
            };
        }
    }
    if let Verdict::StrategyInconsistent(claimed) = &cert.verdict {
        return Err(Rejection::Verdict(format!("no inconsistency `{claimed}` in the answers")));
    }
    check_stage(cert)?;

    let answer = |p: &str| cert.answer(p).ok_or_else(|| Rejection::MissingAnswer(p.to_string()));
    match &cert.verdict {
        Verdict::MonochromaticTriangle { others, color } => {
            let (a, b) = others;
            let pa = st.position(a).ok_or_else(|| Rejection::UnknownPoint(a.clone()))?;
            let pb = st.position(b).ok_or_else(|| Rejection::UnknownPoint(b.clone()))?;
            if pa >= pb {
                return Err(Rejection::Verdict("triangle points out of order".into()));
            }
            if &answer(a)?.color != color || &answer(b)?.color != color || st.color(pa, pb) != color
            {
                return Err(Rejection::Verdict("triangle is not monochromatic".into()));
            }
            if let (Some(t1), Some(t2)) = (&cert.t1, &cert.t2) {
                if (t1, t2) != (a, b) || answer(t1)?.side != answer(t2)?.side {
                    return Err(Rejection::Verdict("final triangle must be {t, t1, t2}".into()));
                }
            }
            Ok(())
        }
        Verdict::EquivarianceViolation { first, second } => {
            let (Some(t1), Some(t2)) = (&cert.t1, &cert.t2) else {
                return Err(Rejection::Verdict("violation needs t1 and t2".into()));
            };
            if answer(t1)? != first || answer(t2)? != second {
                return Err(Rejection::Verdict("recorded answers on t1, t2 differ".into()));
            }
            if first == second {
                return Err(Rejection::Verdict("answers on t1 and t2 agree".into()));
            }
            Ok(())
        }
        Verdict::StrategyInconsistent(_) => unreachable!("handled during replay"),
    }
}

/// The base must be a valid level-0 structure sitting inside the final
/// structure under its own point names.
fn check_base(cert: &RefutationCertificate) -> Result<(), Rejection> {
    let (st, base) = (&cert.structure, &cert.base);
    if base.level() != 0 || !validate(base).is_valid() {
        return Err(Rejection::BaseNotSubstructure);
    }
    let pos = base
        .points()
        .iter()
        .map(|p| st.position(p))
        .collect::<Option<Vec<_>>>()
        .ok_or(Rejection::BaseNotSubstructure)?;
    if pos.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Rejection::BaseNotSubstructure);
    }
    for a in 0..pos.len() {
        for b in a + 1..pos.len() {
            if st.color(pos[a], pos[b]) != base.color(a, b) {
                return Err(Rejection::BaseNotSubstructure);
            }
        }
    }
    Ok(())
}

/// Checks the parts of the procedure the certificate claims to have
/// reached: realizations of `t1` and `t2`, the bridge color, `α` and its
/// transcript.
fn check_stage(cert: &RefutationCertificate) -> Result<(), Rejection> {
    let st = &cert.structure;
    let base_pos: Vec<usize> = cert
        .base
        .points()
        .iter()
        .map(|p| st.position(p).expect("checked base"))
        .collect();
    let realizes = |t: &str, full: &OnePointType| -> Result<(), Rejection> {
        let u = st.position(t).ok_or_else(|| Rejection::UnknownPoint(t.to_string()))?;
        if base_pos.contains(&u) {
            return Err(Rejection::TypeNotRealized(t.to_string()));
        }
        let got = type_of_point(st, u, &base_pos).map_err(|_| Rejection::TypeNotRealized(t.to_string()))?;
        if got.cut != full.cut || got.colors != full.colors {
            return Err(Rejection::TypeNotRealized(t.to_string()));
        }
        Ok(())
    };
    let no_alpha = |cert: &RefutationCertificate| {
        if cert.alpha.is_empty() && cert.steps.is_empty() {
            Ok(())
        } else {
            Err(Rejection::Alpha("present before t2 exists".into()))
        }
    };

    let Some(t1) = &cert.t1 else {
        if cert.t2.is_some() {
            return Err(Rejection::Verdict("t2 without t1".into()));
        }
        return no_alpha(cert);
    };
    let full = full_type(&cert.base, &cert.answers).ok_or_else(|| {
        Rejection::MissingAnswer("base point".into())
    })?;
    realizes(t1, &full)?;
    let q = &cert
        .answer(t1)
        .ok_or_else(|| Rejection::MissingAnswer(t1.clone()))?
        .color;

    let Some(t2) = &cert.t2 else {
        return no_alpha(cert);
    };
    if t1 == t2 {
        return Err(Rejection::TypeNotRealized(t2.clone()));
    }
    realizes(t2, &full)?;
    let (p1, p2) = (st.position(t1).expect("realized"), st.position(t2).expect("realized"));
    if st.color(p1, p2) != q {
        return Err(Rejection::WrongBridgeColor);
    }

    // α: identity on the base, then t1 ↦ t2, then the transcript
    let n = cert.base.len();
    let pairs = &cert.alpha.pairs;
    if pairs.len() != n + 1 + cert.steps.len() {
        return Err(Rejection::Alpha("length does not match the transcript".into()));
    }
    for (k, p) in cert.base.points().iter().enumerate() {
        if pairs[k].0 != *p || pairs[k].1 != *p {
            return Err(Rejection::Alpha(format!("does not fix `{p}`")));
        }
    }
    if pairs[n] != (t1.clone(), t2.clone()) {
        return Err(Rejection::Alpha("does not send t1 to t2".into()));
    }
    if cert.steps.len() != cert.depth {
        return Err(Rejection::Transcript(format!(
            "{} steps for depth {}",
            cert.steps.len(),
            cert.depth
        )));
    }
    for (k, step) in cert.steps.iter().enumerate() {
        let expected = if k % 2 == 0 {
            Direction::Forth
        } else {
            Direction::Back
        };
        if step.direction != expected {
            return Err(Rejection::Transcript(format!("step {k} goes the wrong way")));
        }
        if pairs[n + 1 + k] != (step.from.clone(), step.to.clone()) {
            return Err(Rejection::Transcript(format!("step {k} disagrees with α")));
        }
    }
    if !cert.alpha.is_valid(st) {
        return Err(Rejection::Alpha("not a partial isomorphism".into()));
    }
    Ok(())
}

/// Checks a certificate against a fresh instance of the strategy it names.
pub fn check_certificate_by_name(cert: &RefutationCertificate) -> Result<(), Rejection> {
    let mut strategy =
        strategy_by_name(&cert.strategy).map_err(|e| Rejection::Strategy(e.to_string()))?;
    check_certificate(cert, strategy.as_mut())
}
