//! Certificate text format and the mutation battery.
//!
//! ```text
//! certificate
//! STRUCTURE
//! structure x level 0
//! ...
//! created a b p0 p1
//! structure x level 0
//! ...
//! POINTS
//! type supp=a cut=1 colors=b:0:1 level=0
//! t1 p0
//! t2 p1
//! ALPHA
//! pair a a
//! pair p0 p1
//! TRANSCRIPT
//! answer a above b:0:1
//! forth p1 p2
//! VERDICT
//! strategy constant
//! depth 1
//! kind monochromatic-triangle
//! triangle p0 p1 b:0:0
//! ```
//!
//! The first structure is the final approximation, the second the base.

use crate::color::ColorTerm;
use crate::error::ParseError;
use crate::format::{read_structure, tokenize, write_structure, Line, Writer};
use crate::limit::PartialIso;
use crate::types::OnePointType;

use super::{Answer, Direction, Inconsistency, RefutationCertificate, Side, Step, Verdict};

pub fn write_certificate(w: &mut Writer, cert: &RefutationCertificate) {
    w.header("certificate");
    w.header("STRUCTURE");
    write_structure(w, &cert.structure);
    w.header(format!("created {}", cert.created.join(" ")).trim_end());
    w.end_block();
    write_structure(w, &cert.base);

    w.header("POINTS");
    w.item(cert.target.to_text(&cert.base));
    if let Some(t1) = &cert.t1 {
        w.item(format!("t1 {t1}"));
    }
    if let Some(t2) = &cert.t2 {
        w.item(format!("t2 {t2}"));
    }
    w.end_block();

    w.header("ALPHA");
    for line in cert.alpha.to_lines() {
        w.item(line);
    }
    w.end_block();

    w.header("TRANSCRIPT");
    for (p, a) in &cert.answers {
        w.item(format!("answer {p} {a}"));
    }
    for s in &cert.steps {
        let dir = match s.direction {
            Direction::Forth => "forth",
            Direction::Back => "back",
        };
        w.item(format!("{dir} {} {}", s.from, s.to));
    }
    w.end_block();

    w.header("VERDICT");
    w.item(format!("strategy {}", cert.strategy));
    w.item(format!("depth {}", cert.depth));
    w.item(format!("kind {}", cert.verdict.kind()));
    match &cert.verdict {
        Verdict::MonochromaticTriangle { others, color } => {
            w.item(format!("triangle {} {} {color}", others.0, others.1));
        }
        Verdict::EquivarianceViolation { first, second } => {
            w.item(format!("q {first}"));
            w.item(format!("q' {second}"));
        }
        Verdict::StrategyInconsistent(reason) => {
            w.item(format!("reason {reason}"));
        }
    }
    w.end_block();
}

fn color(line: &Line<'_>, token: &str) -> Result<ColorTerm, ParseError> {
    token
        .parse()
        .map_err(|e: ParseError| ParseError::line(line.number, e.to_string()))
}

fn answer(line: &Line<'_>, side: &str, c: &str) -> Result<Answer, ParseError> {
    let side: Side = side
        .parse()
        .map_err(|_| ParseError::line(line.number, format!("bad side `{side}`")))?;
    Ok(Answer::new(side, color(line, c)?))
}

pub fn parse_certificate(text: &str) -> Result<RefutationCertificate, ParseError> {
    let lines = tokenize(text);
    let mut section = "";
    let mut structures = Vec::new();
    let mut created = None;
    let mut type_line = None;
    let (mut t1, mut t2) = (None, None);
    let mut alpha = Vec::new();
    let mut answers = Vec::new();
    let mut steps = Vec::new();
    let mut strategy = None;
    let mut depth = None;
    let mut kind = None;
    let mut triangle = None;
    let (mut q, mut q_prime) = (None, None);
    let mut reason = None;

    let mut pos = 0;
    while pos < lines.len() {
        let line = &lines[pos];
        let t = &line.tokens;
        let bad = |m: &str| ParseError::line(line.number, m.to_string());
        match (section, line.keyword()) {
            (_, s @ ("STRUCTURE" | "POINTS" | "ALPHA" | "TRANSCRIPT" | "VERDICT")) => {
                line.expect_len(1)?;
                section = s;
            }
            ("", "certificate") => line.expect_len(1)?,
            ("STRUCTURE", "structure") => {
                structures.push(read_structure(&lines, &mut pos)?);
                continue;
            }
            ("STRUCTURE", "created") => {
                created = Some(t[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>());
            }
            ("POINTS", "type") => type_line = Some(t.join(" ")),
            ("POINTS", "t1") => {
                line.expect_len(2)?;
                t1 = Some(t[1].to_string());
            }
            ("POINTS", "t2") => {
                line.expect_len(2)?;
                t2 = Some(t[1].to_string());
            }
            ("ALPHA", "pair") => {
                line.expect_len(3)?;
                alpha.push((t[1].to_string(), t[2].to_string()));
            }
            ("TRANSCRIPT", "answer") => {
                line.expect_len(4)?;
                answers.push((t[1].to_string(), answer(line, t[2], t[3])?));
            }
            ("TRANSCRIPT", dir @ ("forth" | "back")) => {
                line.expect_len(3)?;
                steps.push(Step {
                    direction: if dir == "forth" {
                        Direction::Forth
                    } else {
                        Direction::Back
                    },
                    from: t[1].to_string(),
                    to: t[2].to_string(),
                });
            }
            ("VERDICT", "strategy") => {
                if t.len() < 2 {
                    return Err(bad("`strategy` expects a name"));
                }
                strategy = Some(t[1..].join(" "));
            }
            ("VERDICT", "depth") => {
                line.expect_len(2)?;
                depth = Some(t[1].parse::<usize>().map_err(|_| bad("bad depth"))?);
            }
            ("VERDICT", "kind") => {
                line.expect_len(2)?;
                kind = Some(t[1]);
            }
            ("VERDICT", "triangle") => {
                line.expect_len(4)?;
                triangle = Some(((t[1].to_string(), t[2].to_string()), color(line, t[3])?));
            }
            ("VERDICT", "q") => {
                line.expect_len(3)?;
                q = Some(answer(line, t[1], t[2])?);
            }
            ("VERDICT", "q'") => {
                line.expect_len(3)?;
                q_prime = Some(answer(line, t[1], t[2])?);
            }
            ("VERDICT", "reason") => {
                reason = Some(match t[1..] {
                    ["support-mismatch", p] => Inconsistency::SupportMismatch(p.to_string()),
                    ["color-outside-class", p] => Inconsistency::ColorOutsideClass(p.to_string()),
                    ["not-a-cut", a, b] => Inconsistency::NotACut(a.to_string(), b.to_string()),
                    _ => return Err(bad("bad reason")),
                });
            }
            _ => return Err(bad(&format!("unexpected `{}`", line.keyword()))),
        }
        pos += 1;
    }

    let missing = |s: &str| ParseError::MissingSection(s.to_string());
    let [structure, base]: [_; 2] = structures
        .try_into()
        .map_err(|_| ParseError::line(0, "STRUCTURE needs the approximation and the base"))?;
    let target = OnePointType::parse(&type_line.ok_or_else(|| missing("type"))?, &base)?;
    let verdict = match kind.ok_or_else(|| missing("kind"))? {
        "monochromatic-triangle" => {
            let (others, color) = triangle.ok_or_else(|| missing("triangle"))?;
            Verdict::MonochromaticTriangle { others, color }
        }
        "equivariance-violation" => Verdict::EquivarianceViolation {
            first: q.ok_or_else(|| missing("q"))?,
            second: q_prime.ok_or_else(|| missing("q'"))?,
        },
        "strategy-inconsistent" => {
            Verdict::StrategyInconsistent(reason.ok_or_else(|| missing("reason"))?)
        }
        other => return Err(ParseError::line(0, format!("unknown kind `{other}`"))),
    };
    Ok(RefutationCertificate {
        strategy: strategy.ok_or_else(|| missing("strategy"))?,
        structure,
        created: created.ok_or_else(|| missing("created"))?,
        base,
        target,
        t1,
        t2,
        alpha: PartialIso::new(alpha),
        depth: depth.ok_or_else(|| missing("depth"))?,
        answers,
        steps,
        verdict,
    })
}

fn other_color(c: &ColorTerm) -> ColorTerm {
    match c {
        ColorTerm::Base { level: 0, index } => ColorTerm::base(0, index + 1),
        _ => ColorTerm::base(0, 0),
    }
}

fn flip(side: Side) -> Side {
    match side {
        Side::Above => Side::Below,
        Side::Below => Side::Above,
    }
}

/// Tampered copies of `cert`, each labelled, every one of which a sound
/// checker must reject.
pub fn mutants(cert: &RefutationCertificate) -> Vec<(String, RefutationCertificate)> {
    let mut out: Vec<(String, RefutationCertificate)> = Vec::new();
    let mut push = |label: String, m: RefutationCertificate| out.push((label, m));
    let st = &cert.structure;
    let pos = |p: &str| st.position(p).expect("certificate point");

    let recolor = |label: &str, a: &str, b: &str| {
        let mut m = cert.clone();
        let (i, j) = (pos(a), pos(b));
        let c = other_color(st.color(i, j));
        m.structure.recolor(i, j, c);
        (format!("recolor {label} {a} {b}"), m)
    };
    let base_names = cert.base.points();
    let mut special: Vec<&String> = Vec::new();
    special.extend(cert.t1.iter());
    special.extend(cert.t2.iter());
    if let (Some(t1), Some(t2)) = (&cert.t1, &cert.t2) {
        let (l, m) = recolor("bridge", t1, t2);
        push(l, m);
    }
    for t in &special {
        for v in base_names {
            let (l, m) = recolor("base-to-t", v, t);
            push(l, m);
        }
    }
    for a in 0..base_names.len() {
        for b in a + 1..base_names.len() {
            let (l, m) = recolor("inside-base", &base_names[a], &base_names[b]);
            push(l, m);
            let mut m = cert.clone();
            m.base.recolor(a, b, other_color(cert.base.color(a, b)));
            push(format!("recolor base copy {a} {b}"), m);
        }
    }

    for (k, (p, a)) in cert.answers.iter().enumerate() {
        let mut m = cert.clone();
        m.answers[k].1 = Answer::new(a.side, other_color(&a.color));
        push(format!("forge color of {p}"), m);
        let mut m = cert.clone();
        m.answers[k].1 = Answer::new(flip(a.side), a.color.clone());
        push(format!("forge side of {p}"), m);
    }
    if let Some(last) = cert.answers.last() {
        let mut m = cert.clone();
        m.answers.pop();
        push("drop last answer".into(), m);
        let mut m = cert.clone();
        m.answers.push(last.clone());
        push("duplicate last answer".into(), m);
    }
    if !cert.target.support.is_empty() {
        let mut m = cert.clone();
        m.target.colors[0] = other_color(&m.target.colors[0]);
        if m.target.check(&m.base).is_ok() {
            push("change the type".into(), m);
        }
    }

    let n = base_names.len();
    if cert.t2.is_some() {
        if n >= 2 {
            let mut m = cert.clone();
            m.alpha.pairs[0].1 = base_names[1].clone();
            m.alpha.pairs[1].1 = base_names[0].clone();
            push("alpha swaps base points".into(), m);
        }
        let t1 = cert.t1.clone().expect("t1 before t2");
        let mut m = cert.clone();
        m.alpha.pairs[n].1 = t1.clone();
        push("alpha fixes t1".into(), m);
        let mut m = cert.clone();
        m.t2 = Some(t1.clone());
        push("t2 replaced by t1".into(), m);
        let mut m = cert.clone();
        std::mem::swap(&mut m.t1, &mut m.t2);
        push("t1 and t2 exchanged".into(), m);
        let mut m = cert.clone();
        m.depth += 1;
        push("depth raised".into(), m);
        if !cert.steps.is_empty() {
            let mut m = cert.clone();
            m.steps.pop();
            push("transcript step dropped".into(), m);
            let mut m = cert.clone();
            m.steps.pop();
            m.alpha.pairs.pop();
            push("last step removed, depth kept".into(), m);
        }
    } else {
        let mut m = cert.clone();
        m.alpha = PartialIso::identity(base_names.iter().map(String::as_str));
        m.alpha.pairs.push((base_names.first().cloned().unwrap_or_default(), String::new()));
        push("alpha without t2".into(), m);
    }

    match &cert.verdict {
        Verdict::MonochromaticTriangle { others, color } => {
            let mut m = cert.clone();
            m.verdict = Verdict::MonochromaticTriangle {
                others: others.clone(),
                color: other_color(color),
            };
            push("triangle color changed".into(), m);
            let mut m = cert.clone();
            m.verdict = Verdict::MonochromaticTriangle {
                others: (others.1.clone(), others.0.clone()),
                color: color.clone(),
            };
            push("triangle points reversed".into(), m);
            if let Some(a) = cert.answer(&others.1) {
                let mut m = cert.clone();
                m.verdict = Verdict::EquivarianceViolation {
                    first: a.clone(),
                    second: a.clone(),
                };
                push("kind changed".into(), m);
            }
        }
        Verdict::EquivarianceViolation { first, second } => {
            let mut m = cert.clone();
            m.verdict = Verdict::EquivarianceViolation {
                first: Answer::new(first.side, other_color(&first.color)),
                second: second.clone(),
            };
            push("q changed".into(), m);
            let mut m = cert.clone();
            m.verdict = Verdict::EquivarianceViolation {
                first: first.clone(),
                second: first.clone(),
            };
            push("q' set to q".into(), m);
            let mut m = cert.clone();
            m.verdict = Verdict::MonochromaticTriangle {
                others: (cert.t1.clone().unwrap(), cert.t2.clone().unwrap()),
                color: first.color.clone(),
            };
            push("kind changed".into(), m);
        }
        Verdict::StrategyInconsistent(reason) => {
            let mut m = cert.clone();
            let wrong = match reason {
                Inconsistency::NotACut(a, b) => Inconsistency::NotACut(b.clone(), a.clone()),
                Inconsistency::SupportMismatch(p) => Inconsistency::ColorOutsideClass(p.clone()),
                Inconsistency::ColorOutsideClass(p) => Inconsistency::SupportMismatch(p.clone()),
            };
            m.verdict = Verdict::StrategyInconsistent(wrong);
            push("reason changed".into(), m);
            if let Some((p, a)) = cert.answers.first() {
                let mut m = cert.clone();
                m.verdict = Verdict::MonochromaticTriangle {
                    others: (p.clone(), p.clone()),
                    color: a.color.clone(),
                };
                push("kind changed".into(), m);
            }
            if cert.t1.is_none() {
                if let Some(p) = st.points().iter().find(|p| !base_names.contains(p)) {
                    let mut m = cert.clone();
                    m.t1 = Some(p.clone());
                    push("t1 invented".into(), m);
                }
            }
        }
    }
    let mut m = cert.clone();
    m.created.reverse();
    m.created.pop();
    push("creation order truncated".into(), m);
    out
}
