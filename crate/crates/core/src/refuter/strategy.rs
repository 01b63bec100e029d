//! Candidate homogeneous extensions, as black-box query strategies.
//!
//! A strategy describes a virtual point `t` added to the limit: asked about
//! a point `u`, it answers on which side of `u` the point `t` lies and the
//! color of `{t, u}`.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::color::ColorTerm;
use crate::format::{structure_to_string, Layout};
use crate::structure::FinStruct;
use crate::types::OnePointType;

/// Side of the virtual point relative to the queried point.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum Side {
    /// `u < t`
    Above,
    /// `t < u`
    Below,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Above => "above",
            Side::Below => "below",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "above" => Ok(Side::Above),
            "below" => Ok(Side::Below),
            _ => Err(()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Answer {
    pub side: Side,
    pub color: ColorTerm,
}

impl Answer {
    pub fn new(side: Side, color: ColorTerm) -> Self {
        Answer { side, color }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.side, self.color)
    }
}

/// Everything a strategy may look at when answering.
#[derive(Clone, Copy, Debug)]
pub struct QueryContext<'a> {
    /// The approximation as it stands.
    pub structure: &'a FinStruct,
    /// Points of `structure` in creation order.
    pub created: &'a [String],
    /// The fixed base `x`, a substructure of `structure` (same names).
    pub base: &'a FinStruct,
    /// The prescribed type of `t` over `base`.
    pub target: &'a OnePointType,
    /// The queried point.
    pub point: &'a str,
}

impl QueryContext<'_> {
    /// The answer dictated by the target type when the point lies in its
    /// support.
    pub fn forced(&self) -> Option<Answer> {
        let v = self.base.position(self.point)?;
        let k = self.target.support.binary_search(&v).ok()?;
        let side = if k < self.target.cut {
            Side::Above
        } else {
            Side::Below
        };
        Some(Answer::new(side, self.target.colors[k].clone()))
    }

    /// Number of base points below the queried point.
    pub fn base_points_below(&self) -> usize {
        let pos = self
            .structure
            .position(self.point)
            .expect("queried point exists");
        self.base
            .points()
            .iter()
            .filter(|b| self.structure.position(b).is_some_and(|p| p < pos))
            .count()
    }

    /// Side from the minimal placement of `t` over the base: above the
    /// points below its gap, below everything else.
    pub fn placement_side(&self) -> Side {
        let gap = self.target.gap();
        match self.base.position(self.point) {
            Some(v) if v < gap => Side::Above,
            Some(_) => Side::Below,
            None if self.base_points_below() < gap => Side::Above,
            None => Side::Below,
        }
    }

    pub fn created_index(&self) -> usize {
        self.created
            .iter()
            .position(|p| p == self.point)
            .expect("queried point was created")
    }

    /// Hex digest of the current structure, as sent to external strategies.
    pub fn structure_hash(&self) -> String {
        let text = structure_to_string(self.structure, Layout::Compact);
        hex::encode(&Sha256::digest(text.as_bytes())[..8])
    }
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("strategy process: {0}")]
    Io(#[from] std::io::Error),
    #[error("strategy protocol: {0}")]
    Protocol(String),
}

pub trait ExtensionStrategy {
    /// Name recorded in certificates; `strategy_by_name` resolves it back.
    fn name(&self) -> String;

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError>;
}

fn base(n: u64) -> ColorTerm {
    ColorTerm::base(0, n)
}

/// Always `Base(0,0)` and always above, except on the support where the
/// target type is echoed.
#[derive(Clone, Debug, Default)]
pub struct Constant;

impl ExtensionStrategy for Constant {
    fn name(&self) -> String {
        "constant".into()
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError> {
        Ok(ctx
            .forced()
            .unwrap_or_else(|| Answer::new(Side::Above, base(0))))
    }
}

/// Copies the color between the queried point and the greatest support
/// point. Equivariant under every automorphism fixing the base.
#[derive(Clone, Debug, Default)]
pub struct SupportEcho;

impl ExtensionStrategy for SupportEcho {
    fn name(&self) -> String {
        "support-echo".into()
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError> {
        if let Some(a) = ctx.forced() {
            return Ok(a);
        }
        let color = match ctx.target.support.last() {
            None => base(0),
            Some(&top) => {
                let s = ctx.structure;
                let top = s.position(ctx.base.point(top)).expect("base inside structure");
                let u = s.position(ctx.point).expect("queried point exists");
                s.color(top, u).clone()
            }
        };
        Ok(Answer::new(ctx.placement_side(), color))
    }
}

/// Color from the number of base points below the queried point. Also
/// equivariant.
#[derive(Clone, Debug, Default)]
pub struct OrderSensitive;

impl ExtensionStrategy for OrderSensitive {
    fn name(&self) -> String {
        "order-sensitive".into()
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError> {
        if let Some(a) = ctx.forced() {
            return Ok(a);
        }
        let k = ctx.base_points_below() as u64;
        Ok(Answer::new(ctx.placement_side(), base(k % 3)))
    }
}

/// Color `Base(0, 3 + k)` for the point created `k`-th, which automorphisms
/// do not respect.
#[derive(Clone, Debug, Default)]
pub struct IndexSensitive;

impl ExtensionStrategy for IndexSensitive {
    fn name(&self) -> String {
        "index-sensitive".into()
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError> {
        if let Some(a) = ctx.forced() {
            return Ok(a);
        }
        let k = ctx.created_index() as u64;
        Ok(Answer::new(ctx.placement_side(), base(3 + k)))
    }
}

/// Pseudo-random color per point name, reproducible from the seed.
#[derive(Clone, Debug)]
pub struct Randomized {
    pub seed: u64,
}

impl ExtensionStrategy for Randomized {
    fn name(&self) -> String {
        format!("randomized:{}", self.seed)
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError> {
        if let Some(a) = ctx.forced() {
            return Ok(a);
        }
        let digest = Sha256::digest(ctx.point.as_bytes());
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ u64::from_le_bytes(bytes));
        Ok(Answer::new(ctx.placement_side(), base(rng.gen_range(0..3))))
    }
}

/// Answers `Base(0,0)` off the base except on its second query there, where
/// it answers `Base(0,1)`. Base points off the support get colors above
/// every color of the type, so that neither answer closes a triangle with
/// the base.
#[derive(Clone, Debug, Default)]
pub struct Spoiler {
    outside_queries: usize,
}

impl ExtensionStrategy for Spoiler {
    fn name(&self) -> String {
        "spoiler".into()
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError> {
        if let Some(a) = ctx.forced() {
            return Ok(a);
        }
        if let Some(v) = ctx.base.position(ctx.point) {
            let top = ctx
                .target
                .colors
                .iter()
                .filter_map(|c| match c {
                    ColorTerm::Base { level: 0, index } => Some(*index),
                    _ => None,
                })
                .max()
                .unwrap_or(0)
                .max(1);
            return Ok(Answer::new(ctx.placement_side(), base(top + 1 + v as u64)));
        }
        self.outside_queries += 1;
        let color = if self.outside_queries == 2 { base(1) } else { base(0) };
        Ok(Answer::new(ctx.placement_side(), color))
    }
}

/// A strategy run as a child process speaking the line protocol
/// `query <point-id> <structure-hash>` / `answer <above|below> <color-term>`.
pub struct External {
    command: String,
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl External {
    pub fn spawn(command: &str) -> Result<Self, StrategyError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = BufReader::new(child.stdout.take().expect("piped"));
        Ok(External {
            command: command.to_string(),
            child,
            stdin,
            stdout,
        })
    }
}

impl Drop for External {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl ExtensionStrategy for External {
    fn name(&self) -> String {
        format!("program:{}", self.command)
    }

    fn query(&mut self, ctx: &QueryContext<'_>) -> Result<Answer, StrategyError> {
        writeln!(self.stdin, "query {} {}", ctx.point, ctx.structure_hash())?;
        self.stdin.flush()?;
        let mut line = String::new();
        if self.stdout.read_line(&mut line)? == 0 {
            return Err(StrategyError::Protocol("strategy closed its output".into()));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["answer", side, color] => {
                let side = side
                    .parse()
                    .map_err(|_| StrategyError::Protocol(format!("bad side in `{}`", line.trim())))?;
                let color = color
                    .parse()
                    .map_err(|_| StrategyError::Protocol(format!("bad color in `{}`", line.trim())))?;
                Ok(Answer::new(side, color))
            }
            _ => Err(StrategyError::Protocol(format!("unexpected `{}`", line.trim()))),
        }
    }
}

/// The five bundled strategies used by the refutation battery.
pub fn battery() -> Vec<Box<dyn ExtensionStrategy>> {
    vec![
        Box::new(Constant),
        Box::new(SupportEcho),
        Box::new(OrderSensitive),
        Box::new(IndexSensitive),
        Box::new(Randomized { seed: 7 }),
    ]
}

/// Resolves a strategy name as recorded in certificates. `program:<cmd>`
/// spawns an external process.
pub fn strategy_by_name(name: &str) -> Result<Box<dyn ExtensionStrategy>, StrategyError> {
    let unknown = || StrategyError::Protocol(format!("unknown strategy `{name}`"));
    Ok(match name {
        "constant" => Box::new(Constant),
        "support-echo" => Box::new(SupportEcho),
        "order-sensitive" => Box::new(OrderSensitive),
        "index-sensitive" => Box::new(IndexSensitive),
        "randomized" => Box::new(Randomized { seed: 7 }),
        "spoiler" => Box::new(Spoiler::default()),
        _ => {
            if let Some(seed) = name.strip_prefix("randomized:") {
                Box::new(Randomized {
                    seed: seed.parse().map_err(|_| unknown())?,
                })
            } else if let Some(cmd) = name.strip_prefix("program:") {
                Box::new(External::spawn(cmd)?)
            } else {
                return Err(unknown());
            }
        }
    })
}
