//! Text formats for families, sequence sets and adversarial graphs.
//!
//! Writers emit a canonical form; parsers accept exactly that form, so
//! write∘parse is the identity on values and parse∘write is the identity on
//! canonical files. Parsers are total over arbitrary bytes: malformed or
//! oversized input is an error, never a panic.

use crate::adversary::{LayeredAdversarialGraph, LevelCertificate, LevelStatus, Variant};
use crate::radiosim::RadioGraph;
use crate::setfam::{FamilyKind, Guarantee, KindClaim, LabelSet, SequenceSet, SetFamily};
use crate::Label;
use std::fmt::Write as _;
use thiserror::Error;

/// Largest ground set / row length a parser will allocate for.
pub const MAX_GROUND: usize = 1_000_000;
/// Total bitset bytes a family or certificate file may demand.
pub const MAX_FAMILY_BYTES: usize = 64 << 20;
/// Total symbols a sequence-set file may demand.
pub const MAX_SEQ_ENTRIES: usize = 16 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {what}")]
    Malformed { line: usize, what: String },
    #[error("line {line}: label {label} out of range 1..={n}")]
    LabelOutOfRange { line: usize, label: usize, n: usize },
    #[error("input demands more memory than the format allows")]
    TooLarge,
    #[error("{0}")]
    Inconsistent(String),
}

fn bad(line: usize, what: impl Into<String>) -> ParseError {
    ParseError::Malformed {
        line,
        what: what.into(),
    }
}

/// Strict decimal: digits only, no leading zero (except "0"), bounded.
fn parse_num(s: &str, line: usize, cap: u64) -> Result<u64, ParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(line, format!("expected a number, got {s:?}")));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(bad(line, "leading zeros are not canonical"));
    }
    let v: u64 = s.parse().map_err(|_| bad(line, "number out of range"))?;
    if v > cap {
        return Err(ParseError::TooLarge);
    }
    Ok(v)
}

fn expect_kv<'a>(tok: Option<&'a str>, key: &str, line: usize) -> Result<&'a str, ParseError> {
    match tok.and_then(|t| t.strip_prefix(key)) {
        Some(rest) if tok.unwrap().len() > key.len() => Ok(rest),
        _ => Err(bad(line, format!("expected {key}<value>"))),
    }
}

/// Sorted strictly-ascending labels on one line; empty line = empty set.
fn parse_set_line(s: &str, line: usize, n: usize) -> Result<LabelSet, ParseError> {
    let mut set = LabelSet::empty(n);
    if s.is_empty() {
        return Ok(set);
    }
    let mut prev = 0usize;
    for tok in s.split(' ') {
        let v = parse_num(tok, line, MAX_GROUND as u64)? as usize;
        if v == 0 || v > n {
            return Err(ParseError::LabelOutOfRange { line, label: v, n });
        }
        if v <= prev {
            return Err(bad(line, "labels must be strictly ascending"));
        }
        prev = v;
        set.insert(v);
    }
    Ok(set)
}

fn write_set_line(out: &mut String, set: &LabelSet) {
    let mut first = true;
    for l in set.iter() {
        if !first {
            out.push(' ');
        }
        let _ = write!(out, "{l}");
        first = false;
    }
    out.push('\n');
}

fn kind_str(claim: Option<KindClaim>) -> (&'static str, usize, &'static str) {
    match claim {
        None => ("none", 0, "none"),
        Some(c) => {
            let kind = match c.kind {
                FamilyKind::Selective => "selective",
                FamilyKind::StronglySelective => "strong",
            };
            (kind, c.k, c.guarantee.as_str())
        }
    }
}

pub fn format_setfam(fam: &SetFamily) -> String {
    let (kind, k, guarantee) = kind_str(fam.claim());
    let mut out = format!(
        "SETFAM n={} kind={} k={} guarantee={}\n",
        fam.ground_size(),
        kind,
        k,
        guarantee
    );
    for set in fam.sets() {
        write_set_line(&mut out, set);
    }
    out
}

/// Split canonical text: the file must end with a newline; what precedes it
/// is the header plus one line per record (an empty line is an empty record).
fn canonical_lines(input: &str) -> Result<(&str, Vec<&str>), ParseError> {
    let mut parts: Vec<&str> = input.split('\n').collect();
    if parts.pop() != Some("") {
        return Err(ParseError::Inconsistent(
            "file must end with a newline".into(),
        ));
    }
    if parts.is_empty() {
        return Err(bad(1, "empty input"));
    }
    let header = parts.remove(0);
    Ok((header, parts))
}

pub fn parse_setfam(input: &str) -> Result<SetFamily, ParseError> {
    let (header, body) = canonical_lines(input)?;
    let mut toks = header.split(' ');
    if toks.next() != Some("SETFAM") {
        return Err(bad(1, "expected SETFAM header"));
    }
    let n = parse_num(expect_kv(toks.next(), "n=", 1)?, 1, MAX_GROUND as u64)? as usize;
    if n == 0 {
        return Err(bad(1, "ground size must be >= 1"));
    }
    let kind = expect_kv(toks.next(), "kind=", 1)?.to_string();
    let k = parse_num(expect_kv(toks.next(), "k=", 1)?, 1, MAX_GROUND as u64)? as usize;
    let guarantee = expect_kv(toks.next(), "guarantee=", 1)?.to_string();
    if toks.next().is_some() {
        return Err(bad(1, "trailing tokens in header"));
    }

    let claim = match (kind.as_str(), guarantee.as_str()) {
        ("none", "none") if k == 0 => None,
        ("none", _) => return Err(bad(1, "kind=none requires k=0 guarantee=none")),
        (kind, guarantee) => {
            let kind = match kind {
                "selective" => FamilyKind::Selective,
                "strong" => FamilyKind::StronglySelective,
                other => return Err(bad(1, format!("unknown kind {other:?}"))),
            };
            let guarantee = match guarantee {
                "verified" => Guarantee::Verified,
                "probabilistic" => Guarantee::Probabilistic,
                "certified" => Guarantee::Certified,
                other => return Err(bad(1, format!("unknown guarantee {other:?}"))),
            };
            if k == 0 || k > n {
                return Err(bad(1, "claimed k must lie in 1..=n"));
            }
            Some(KindClaim { kind, k, guarantee })
        }
    };

    let mut sets = Vec::new();
    let mut bytes = 0usize;
    for (i, line) in body.iter().enumerate() {
        bytes += n.div_ceil(64) * 8;
        if bytes > MAX_FAMILY_BYTES {
            return Err(ParseError::TooLarge);
        }
        sets.push(parse_set_line(line, i + 2, n)?);
    }
    let fam = SetFamily::new(n, sets).map_err(|e| ParseError::Inconsistent(e.to_string()))?;
    Ok(match claim {
        Some(c) => fam.with_claim(c),
        None => fam,
    })
}

pub fn format_seqset(seqs: &SequenceSet) -> String {
    let mut out = format!(
        "SEQSET n={} r={} m={}\n",
        seqs.count(),
        seqs.alphabet_max(),
        seqs.length()
    );
    for row in seqs.rows() {
        let mut first = true;
        for &v in row {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn parse_seqset(input: &str) -> Result<SequenceSet, ParseError> {
    let (header, body) = canonical_lines(input)?;
    let mut toks = header.split(' ');
    if toks.next() != Some("SEQSET") {
        return Err(bad(1, "expected SEQSET header"));
    }
    let n = parse_num(expect_kv(toks.next(), "n=", 1)?, 1, MAX_GROUND as u64)? as usize;
    let r = parse_num(expect_kv(toks.next(), "r=", 1)?, 1, u32::MAX as u64)? as u32;
    let m = parse_num(expect_kv(toks.next(), "m=", 1)?, 1, MAX_SEQ_ENTRIES as u64)? as usize;
    if toks.next().is_some() {
        return Err(bad(1, "trailing tokens in header"));
    }
    if n.saturating_mul(m.max(1)) > MAX_SEQ_ENTRIES {
        return Err(ParseError::TooLarge);
    }
    if body.len() != n {
        return Err(ParseError::Inconsistent(format!(
            "expected {n} rows, found {}",
            body.len()
        )));
    }

    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (i, line) in body.iter().enumerate() {
        let line_no = i + 2;
        let mut row = Vec::with_capacity(m);
        if !line.is_empty() {
            for tok in line.split(' ') {
                row.push(parse_num(tok, line_no, r as u64)? as u32);
            }
        }
        if row.len() != m {
            return Err(bad(
                line_no,
                format!("row has {} symbols, header says {m}", row.len()),
            ));
        }
        rows.push(row);
    }
    SequenceSet::new(r, rows).map_err(|e| ParseError::Inconsistent(e.to_string()))
}

fn variant_str(v: Variant) -> String {
    match v {
        Variant::General => "general".into(),
        Variant::Degree(d) => format!("degree:{d}"),
    }
}

fn status_from(s: &str, line: usize) -> Result<LevelStatus, ParseError> {
    Ok(match s {
        "certified" => LevelStatus::Certified,
        "no-delay" => LevelStatus::NoDelay,
        "budget-exceeded" => LevelStatus::BudgetExceeded,
        other => return Err(bad(line, format!("unknown status {other:?}"))),
    })
}

/// Edge-list text format with level annotations and the per-level delay
/// certificates (window slots plus their transmit sets, one set per line in
/// the family-file style).
pub fn format_advgraph(g: &LayeredAdversarialGraph) -> String {
    let n = g.graph.node_count();
    debug_assert!(!g.protocol_name.contains(char::is_whitespace));
    let mut out = format!(
        "ADVGRAPH n={} d={} variant={} protocol={}\n",
        n,
        g.depth(),
        variant_str(g.variant),
        g.protocol_name
    );
    out.push_str("LEVELS\n");
    for (j, level) in g.levels.iter().enumerate() {
        let _ = write!(out, "{j}:");
        for &l in level {
            let _ = write!(out, " {l}");
        }
        out.push('\n');
    }
    out.push_str("WINDOWS\n");
    let mut first = true;
    for &w in &g.windows {
        if !first {
            out.push(' ');
        }
        let _ = write!(out, "{w}");
        first = false;
    }
    out.push('\n');
    out.push_str("EDGES\n");
    for (u, v) in g.graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    for cert in &g.certs {
        let _ = writeln!(
            out,
            "CERT gates={} start={} len={} status={}",
            cert.gates_level,
            cert.window_start,
            cert.sets.len(),
            cert.status.as_str()
        );
        for set in &cert.sets {
            write_set_line(&mut out, set);
        }
    }
    out
}

pub fn parse_advgraph(input: &str) -> Result<LayeredAdversarialGraph, ParseError> {
    let (header, body) = canonical_lines(input)?;
    let mut cursor = 0usize; // index into body; line number = cursor + 2
    let next_line = |cursor: &mut usize| -> Option<(usize, &str)> {
        let i = *cursor;
        if i < body.len() {
            *cursor += 1;
            Some((i + 2, body[i]))
        } else {
            None
        }
    };
    let mut toks = header.split(' ');
    if toks.next() != Some("ADVGRAPH") {
        return Err(bad(1, "expected ADVGRAPH header"));
    }
    let n = parse_num(expect_kv(toks.next(), "n=", 1)?, 1, MAX_GROUND as u64)? as usize;
    let d = parse_num(expect_kv(toks.next(), "d=", 1)?, 1, n as u64)? as usize;
    let variant_s = expect_kv(toks.next(), "variant=", 1)?;
    let variant = if variant_s == "general" {
        Variant::General
    } else if let Some(ds) = variant_s.strip_prefix("degree:") {
        Variant::Degree(parse_num(ds, 1, n as u64)? as usize)
    } else {
        return Err(bad(1, format!("unknown variant {variant_s:?}")));
    };
    let protocol_name = expect_kv(toks.next(), "protocol=", 1)?.to_string();
    if toks.next().is_some() {
        return Err(bad(1, "trailing tokens in header"));
    }
    if n == 0 || d == 0 {
        return Err(bad(1, "need n >= 1 and d >= 1"));
    }

    let (ln, marker) = next_line(&mut cursor).ok_or_else(|| bad(2, "missing LEVELS"))?;
    if marker != "LEVELS" {
        return Err(bad(ln, "expected LEVELS"));
    }
    let mut levels: Vec<Vec<Label>> = Vec::with_capacity(d + 1);
    let mut seen = vec![false; n + 1];
    for j in 0..=d {
        let (line_no, line) = next_line(&mut cursor)
            .ok_or_else(|| ParseError::Inconsistent("missing level line".into()))?;
        let rest = line
            .strip_prefix(&format!("{j}:"))
            .ok_or_else(|| bad(line_no, format!("expected level {j}")))?;
        let rest = match rest {
            "" => "",
            r => r
                .strip_prefix(' ')
                .ok_or_else(|| bad(line_no, "expected a space after the level index"))?,
        };
        let mut members = Vec::new();
        for tok in rest.split(' ') {
            let v = parse_num(tok, line_no, n as u64)? as usize;
            if v == 0 || v > n {
                return Err(ParseError::LabelOutOfRange {
                    line: line_no,
                    label: v,
                    n,
                });
            }
            if seen[v] {
                return Err(bad(line_no, format!("label {v} appears twice")));
            }
            seen[v] = true;
            members.push(v);
        }
        if members.is_empty() {
            return Err(bad(line_no, "levels must be nonempty"));
        }
        levels.push(members);
    }
    if !seen[1..].iter().all(|&s| s) {
        return Err(ParseError::Inconsistent(
            "levels do not partition the node set".into(),
        ));
    }

    let (ln, marker) = next_line(&mut cursor)
        .ok_or_else(|| ParseError::Inconsistent("missing WINDOWS".into()))?;
    if marker != "WINDOWS" {
        return Err(bad(ln, "expected WINDOWS"));
    }
    let (wln, wline) = next_line(&mut cursor)
        .ok_or_else(|| ParseError::Inconsistent("missing window values".into()))?;
    let windows: Vec<u64> = wline
        .split(' ')
        .map(|t| parse_num(t, wln, u64::MAX / 4))
        .collect::<Result<_, _>>()?;
    if windows.len() != d {
        return Err(ParseError::Inconsistent(format!(
            "expected {d} windows, got {}",
            windows.len()
        )));
    }

    let (ln, marker) = next_line(&mut cursor)
        .ok_or_else(|| ParseError::Inconsistent("missing EDGES".into()))?;
    if marker != "EDGES" {
        return Err(bad(ln, "expected EDGES"));
    }
    let mut edges: Vec<(Label, Label)> = Vec::new();
    let mut certs: Vec<LevelCertificate> = Vec::new();
    let mut pending_cert: Option<(LevelCertificate, usize)> = None;
    let mut certs_started = false;
    let mut bytes = 0usize;
    while let Some((line_no, line)) = next_line(&mut cursor) {
        if let Some((cert, remaining)) = pending_cert.as_mut() {
            cert.sets.push(parse_set_line(line, line_no, n)?);
            bytes += n.div_ceil(64) * 8;
            if bytes > MAX_FAMILY_BYTES {
                return Err(ParseError::TooLarge);
            }
            *remaining -= 1;
            if *remaining == 0 {
                certs.push(pending_cert.take().unwrap().0);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("CERT ") {
            certs_started = true;
            let mut toks = rest.split(' ');
            let gates =
                parse_num(expect_kv(toks.next(), "gates=", line_no)?, line_no, d as u64)? as usize;
            let start = parse_num(
                expect_kv(toks.next(), "start=", line_no)?,
                line_no,
                u64::MAX / 4,
            )?;
            let len = parse_num(
                expect_kv(toks.next(), "len=", line_no)?,
                line_no,
                MAX_FAMILY_BYTES as u64,
            )? as usize;
            let status = status_from(expect_kv(toks.next(), "status=", line_no)?, line_no)?;
            if toks.next().is_some() {
                return Err(bad(line_no, "trailing tokens in CERT header"));
            }
            if gates == 0 {
                return Err(bad(line_no, "gates must be >= 1"));
            }
            let cert = LevelCertificate {
                gates_level: gates,
                window_start: start,
                sets: Vec::new(),
                status,
            };
            if len == 0 {
                certs.push(cert);
            } else {
                pending_cert = Some((cert, len));
            }
            continue;
        }
        if certs_started {
            return Err(bad(line_no, "edges must precede certificates"));
        }
        let mut toks = line.split(' ');
        let u = parse_num(toks.next().unwrap_or(""), line_no, n as u64)? as usize;
        let v = match toks.next() {
            Some(t) => parse_num(t, line_no, n as u64)? as usize,
            None => return Err(bad(line_no, "edge needs two labels")),
        };
        if toks.next().is_some() {
            return Err(bad(line_no, "trailing tokens on edge line"));
        }
        if u == 0 || v == 0 {
            return Err(ParseError::LabelOutOfRange {
                line: line_no,
                label: 0,
                n,
            });
        }
        if let Some(&last) = edges.last() {
            if (u, v) <= last {
                return Err(bad(line_no, "edges must be strictly ascending"));
            }
        }
        edges.push((u, v));
    }
    if pending_cert.is_some() {
        return Err(ParseError::Inconsistent(
            "certificate promises more sets than the file holds".into(),
        ));
    }
    if certs.len() != d {
        return Err(ParseError::Inconsistent(format!(
            "expected {d} certificates, got {}",
            certs.len()
        )));
    }
    for (i, cert) in certs.iter().enumerate() {
        if cert.gates_level != i + 1 {
            return Err(ParseError::Inconsistent(
                "certificates must gate levels 1..=D in order".into(),
            ));
        }
        if cert.sets.len() as u64 != windows[i] {
            return Err(ParseError::Inconsistent(format!(
                "certificate {} window length {} disagrees with windows entry {}",
                i + 1,
                cert.sets.len(),
                windows[i]
            )));
        }
    }

    let graph = RadioGraph::from_edges(n, &edges)
        .map_err(|e| ParseError::Inconsistent(e.to_string()))?;
    Ok(LayeredAdversarialGraph {
        graph,
        levels,
        windows,
        certs,
        variant,
        protocol_name,
    })
}
