//! Stable text formats for every object the toolkit exchanges.
//!
//! All files are line-oriented UTF-8 with `\n` endings and exact `p/q`
//! rationals, so emitted files are diffable and byte-reproducible:
//!
//! - permutation:  `perm n=<N>` then the N images on one line
//! - atom set:     `set n=<N>` then the sorted members on one line
//! - tower:        `tower n=<N> m=<M>` then base line, residual line
//! - sequence:     `seq L=<L>` then the L rationals on one line
//! - sets file:    `sets <count>` then that many set blocks
//! - certificates: named-field headers followed by embedded blocks in
//!   the formats above (see `cert_to_string`, `witness_to_string`,
//!   `squiggle_to_string`)

use crate::conjugator::ConjugatorCertificate;
use crate::perm::{AtomSet, PermSystem, WeakNeighborhood};
use crate::rokhlin::RokhlinTower;
use crate::splus::{FinitePermWitness, FiniteSequence, OpenInterval};
use crate::witness::UnbalancedWitness;
use crate::{Error, Rational, Result};

pub const CERT_HEADER: &str = "conjugator-certificate";
pub const WITNESS_HEADER: &str = "unbalanced-witness";
pub const SQUIGGLE_HEADER: &str = "squiggle-witness";

pub fn format_ratio(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(text: &str) -> Result<Rational> {
    let bad = || Error::Invalid(format!("malformed rational `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: i64 = num.trim().parse().map_err(|_| bad())?;
    let den: i64 = den.trim().parse().map_err(|_| bad())?;
    if den <= 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn perm_to_string(p: &PermSystem) -> String {
    format!("perm n={}\n{}\n", p.n(), join(p.images().iter()))
}

pub fn set_to_string(a: &AtomSet) -> String {
    format!("set n={}\n{}\n", a.n(), join(a.members().iter()))
}

pub fn tower_to_string(t: &RokhlinTower) -> String {
    format!(
        "tower n={} m={}\n{}\n{}\n",
        t.transform().n(),
        t.height(),
        join(t.base().members().iter()),
        join(t.residual().members().iter()),
    )
}

pub fn seq_to_string(s: &FiniteSequence) -> String {
    format!(
        "seq L={}\n{}\n",
        s.len(),
        join(s.entries().iter().map(|&r| format_ratio(r)))
    )
}

pub fn sets_to_string(sets: &[AtomSet]) -> String {
    let mut out = format!("sets {}\n", sets.len());
    for set in sets {
        out.push_str(&set_to_string(set));
    }
    out
}

/// Line cursor shared by all parsers; keeps 1-based line numbers for
/// error reports.
struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.pos,
            msg: msg.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.error("unexpected end of input"))?;
        self.pos += 1;
        Ok(line)
    }

    fn expect(&mut self, literal: &str) -> Result<()> {
        let line = self.next_line()?;
        if line.trim_end() != literal {
            return Err(self.error(format!("expected `{literal}`, found `{line}`")));
        }
        Ok(())
    }

    /// Parses `key: value` and returns the value.
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| self.error(format!("expected `{key}: ...`, found `{line}`")))?;
        if k.trim() != key {
            return Err(self.error(format!("expected field `{key}`, found `{k}`")));
        }
        Ok(v.trim())
    }

    fn ratio_field(&mut self, key: &str) -> Result<Rational> {
        let v = self.field(key)?;
        parse_ratio(v).map_err(|e| self.error(e.to_string()))
    }

    fn usize_field(&mut self, key: &str) -> Result<usize> {
        let v = self.field(key)?;
        v.parse()
            .map_err(|_| self.error(format!("malformed integer `{v}`")))
    }

    /// Parses a header of the form `tag key1=v1 key2=v2 …` and returns
    /// the integer values.
    fn tagged_header(&mut self, tag: &str, keys: &[&str]) -> Result<Vec<usize>> {
        let line = self.next_line()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(tag) {
            return Err(self.error(format!("expected `{tag}` header, found `{line}`")));
        }
        let mut values = Vec::with_capacity(keys.len());
        for key in keys {
            let part = parts
                .next()
                .ok_or_else(|| self.error(format!("missing `{key}=`")))?;
            let value = part
                .strip_prefix(&format!("{key}="))
                .ok_or_else(|| self.error(format!("expected `{key}=`, found `{part}`")))?;
            values.push(
                value
                    .parse()
                    .map_err(|_| self.error(format!("malformed integer `{value}`")))?,
            );
        }
        if let Some(extra) = parts.next() {
            return Err(self.error(format!("unexpected trailing `{extra}`")));
        }
        Ok(values)
    }

    fn usize_list(&mut self) -> Result<Vec<usize>> {
        let line = self.next_line()?;
        line.split_whitespace()
            .map(|w| {
                w.parse()
                    .map_err(|_| self.error(format!("malformed integer `{w}`")))
            })
            .collect()
    }

    fn ratio_list(&mut self) -> Result<Vec<Rational>> {
        let line = self.next_line()?;
        line.split_whitespace()
            .map(|w| parse_ratio(w).map_err(|e| self.error(e.to_string())))
            .collect()
    }

    fn perm(&mut self) -> Result<PermSystem> {
        let n = self.tagged_header("perm", &["n"])?[0];
        let images = self.usize_list()?;
        if images.len() != n {
            return Err(self.error(format!("expected {n} images, found {}", images.len())));
        }
        PermSystem::from_map(images).map_err(|e| self.error(e.to_string()))
    }

    fn set(&mut self) -> Result<AtomSet> {
        let n = self.tagged_header("set", &["n"])?[0];
        let members = self.usize_list()?;
        AtomSet::new(n, members).map_err(|e| self.error(e.to_string()))
    }

    fn seq(&mut self) -> Result<FiniteSequence> {
        let len = self.tagged_header("seq", &["L"])?[0];
        let entries = self.ratio_list()?;
        if entries.len() != len {
            return Err(self.error(format!("expected {len} entries, found {}", entries.len())));
        }
        FiniteSequence::new(entries).map_err(|e| self.error(e.to_string()))
    }

    /// Parses a tower block and attaches the given transform.
    fn tower(&mut self, transform: PermSystem) -> Result<RokhlinTower> {
        let header = self.tagged_header("tower", &["n", "m"])?;
        let (n, m) = (header[0], header[1]);
        if n != transform.n() {
            return Err(self.error(format!(
                "tower over {n} atoms does not match transform over {}",
                transform.n()
            )));
        }
        let base = AtomSet::new(n, self.usize_list()?).map_err(|e| self.error(e.to_string()))?;
        let residual =
            AtomSet::new(n, self.usize_list()?).map_err(|e| self.error(e.to_string()))?;
        RokhlinTower::from_parts(transform, m, base, residual).map_err(|e| self.error(e.to_string()))
    }

    fn done(&self) -> Result<()> {
        if let Some(line) = self.lines.get(self.pos) {
            if !line.trim().is_empty() {
                return Err(Error::Parse {
                    line: self.pos + 1,
                    msg: format!("unexpected trailing content `{line}`"),
                });
            }
        }
        Ok(())
    }
}

pub fn parse_perm(text: &str) -> Result<PermSystem> {
    let mut cur = Cursor::new(text);
    let p = cur.perm()?;
    cur.done()?;
    Ok(p)
}

pub fn parse_set(text: &str) -> Result<AtomSet> {
    let mut cur = Cursor::new(text);
    let s = cur.set()?;
    cur.done()?;
    Ok(s)
}

pub fn parse_seq(text: &str) -> Result<FiniteSequence> {
    let mut cur = Cursor::new(text);
    let s = cur.seq()?;
    cur.done()?;
    Ok(s)
}

pub fn parse_sets(text: &str) -> Result<Vec<AtomSet>> {
    let mut cur = Cursor::new(text);
    let line = cur.next_line()?;
    let count: usize = line
        .strip_prefix("sets ")
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| cur.error(format!("expected `sets <count>`, found `{line}`")))?;
    let mut sets = Vec::with_capacity(count);
    for _ in 0..count {
        sets.push(cur.set()?);
    }
    cur.done()?;
    Ok(sets)
}

/// `tower n=<N> m=<M>` blocks do not embed their transform; parsing a
/// standalone tower file therefore takes the transform separately.
pub fn parse_tower(text: &str, transform: PermSystem) -> Result<RokhlinTower> {
    let mut cur = Cursor::new(text);
    let t = cur.tower(transform)?;
    cur.done()?;
    Ok(t)
}

pub fn cert_to_string(cert: &ConjugatorCertificate) -> String {
    let mut out = String::new();
    out.push_str(CERT_HEADER);
    out.push('\n');
    out.push_str(&format!("delta: {}\n", format_ratio(cert.delta_target)));
    out.push_str(&format!("window: {}\n", cert.window));
    out.push_str(&format!("input-dist: {}\n", format_ratio(cert.input_dist)));
    out.push_str(&format!(
        "conj-dist: {}\n",
        format_ratio(cert.measured_conj_dist)
    ));
    out.push_str(&format!(
        "id-dist: {}\n",
        format_ratio(cert.measured_id_dist)
    ));
    out.push_str("s:\n");
    out.push_str(&perm_to_string(&cert.s));
    out.push_str("t:\n");
    out.push_str(&perm_to_string(&cert.t));
    out.push_str("h:\n");
    out.push_str(&perm_to_string(&cert.h));
    out.push_str("tower:\n");
    out.push_str(&tower_to_string(&cert.tower));
    out.push_str("l0:\n");
    out.push_str(&set_to_string(&cert.l0));
    out.push_str("l1:\n");
    out.push_str(&set_to_string(&cert.l1));
    out.push_str("l2:\n");
    out.push_str(&set_to_string(&cert.l2));
    out
}

fn cert_from_cursor(cur: &mut Cursor) -> Result<ConjugatorCertificate> {
    cur.expect(CERT_HEADER)?;
    let delta_target = cur.ratio_field("delta")?;
    let window = cur.usize_field("window")?;
    let input_dist = cur.ratio_field("input-dist")?;
    let measured_conj_dist = cur.ratio_field("conj-dist")?;
    let measured_id_dist = cur.ratio_field("id-dist")?;
    cur.expect("s:")?;
    let s = cur.perm()?;
    cur.expect("t:")?;
    let t = cur.perm()?;
    cur.expect("h:")?;
    let h = cur.perm()?;
    cur.expect("tower:")?;
    let tower = cur.tower(t.clone())?;
    cur.expect("l0:")?;
    let l0 = cur.set()?;
    cur.expect("l1:")?;
    let l1 = cur.set()?;
    cur.expect("l2:")?;
    let l2 = cur.set()?;
    Ok(ConjugatorCertificate {
        s,
        t,
        h,
        window,
        tower,
        l0,
        l1,
        l2,
        delta_target,
        measured_conj_dist,
        measured_id_dist,
        input_dist,
    })
}

pub fn parse_cert(text: &str) -> Result<ConjugatorCertificate> {
    let mut cur = Cursor::new(text);
    let cert = cert_from_cursor(&mut cur)?;
    cur.done()?;
    Ok(cert)
}

pub fn witness_to_string(w: &UnbalancedWitness) -> String {
    let mut out = String::new();
    out.push_str(WITNESS_HEADER);
    out.push('\n');
    out.push_str(&format!("v-eps: {}\n", format_ratio(w.v_eps)));
    out.push_str(&format!("delta: {}\n", format_ratio(w.delta)));
    out.push_str(&format!("final-dist: {}\n", format_ratio(w.final_dist)));
    out.push_str(&format!("u-eps: {}\n", format_ratio(w.u_spec.epsilon())));
    out.push_str(&format!("u-sets: {}\n", w.u_spec.sets().len()));
    for set in w.u_spec.sets() {
        out.push_str(&set_to_string(set));
    }
    out.push_str("u-center:\n");
    out.push_str(&perm_to_string(w.u_spec.center()));
    for (label, p) in [
        ("t1", &w.t1),
        ("t2", &w.t2),
        ("g1", &w.g1),
        ("g2", &w.g2),
        ("h", &w.h),
        ("conj1", &w.conj1),
        ("conj2", &w.conj2),
    ] {
        out.push_str(&format!("{label}:\n"));
        out.push_str(&perm_to_string(p));
    }
    out.push_str("inner:\n");
    out.push_str(&cert_to_string(&w.inner_cert));
    out
}

pub fn parse_witness(text: &str) -> Result<UnbalancedWitness> {
    let mut cur = Cursor::new(text);
    cur.expect(WITNESS_HEADER)?;
    let v_eps = cur.ratio_field("v-eps")?;
    let delta = cur.ratio_field("delta")?;
    let final_dist = cur.ratio_field("final-dist")?;
    let u_eps = cur.ratio_field("u-eps")?;
    let set_count = cur.usize_field("u-sets")?;
    let mut sets = Vec::with_capacity(set_count);
    for _ in 0..set_count {
        sets.push(cur.set()?);
    }
    cur.expect("u-center:")?;
    let center = cur.perm()?;
    let u_spec =
        WeakNeighborhood::new(center, sets, u_eps).map_err(|e| cur.error(e.to_string()))?;
    let mut perms = Vec::with_capacity(7);
    for label in ["t1", "t2", "g1", "g2", "h", "conj1", "conj2"] {
        cur.expect(&format!("{label}:"))?;
        perms.push(cur.perm()?);
    }
    cur.expect("inner:")?;
    let inner_cert = cert_from_cursor(&mut cur)?;
    cur.done()?;
    let mut perms = perms.into_iter();
    Ok(UnbalancedWitness {
        t1: perms.next().unwrap(),
        t2: perms.next().unwrap(),
        g1: perms.next().unwrap(),
        g2: perms.next().unwrap(),
        h: perms.next().unwrap(),
        conj1: perms.next().unwrap(),
        conj2: perms.next().unwrap(),
        u_spec,
        v_eps,
        delta,
        final_dist,
        inner_cert,
    })
}

/// Serializes a prefix-agreement witness together with the sequences it
/// is about, so the file is self-contained for verification.
pub fn squiggle_to_string(
    x: &FiniteSequence,
    y: &FiniteSequence,
    w: &FinitePermWitness,
) -> String {
    let mut out = String::new();
    out.push_str(SQUIGGLE_HEADER);
    out.push('\n');
    out.push_str(&format!("k: {}\n", w.k));
    out.push_str(&format!("box r={}\n", w.intervals.len()));
    for interval in &w.intervals {
        out.push_str(&format!(
            "{} {}\n",
            format_ratio(interval.lo),
            format_ratio(interval.hi)
        ));
    }
    out.push_str("x:\n");
    out.push_str(&seq_to_string(x));
    out.push_str("y:\n");
    out.push_str(&seq_to_string(y));
    out.push_str(&format!("gx: {}\n", join(w.gx.iter())));
    out.push_str(&format!("gy: {}\n", join(w.gy.iter())));
    out
}

pub fn parse_squiggle(text: &str) -> Result<(FiniteSequence, FiniteSequence, FinitePermWitness)> {
    let mut cur = Cursor::new(text);
    cur.expect(SQUIGGLE_HEADER)?;
    let k = cur.usize_field("k")?;
    let r = cur.tagged_header("box", &["r"])?[0];
    let mut intervals = Vec::with_capacity(r);
    for _ in 0..r {
        let pair = cur.ratio_list()?;
        if pair.len() != 2 {
            return Err(cur.error("expected `lo hi`"));
        }
        intervals.push(OpenInterval::new(pair[0], pair[1]).map_err(|e| cur.error(e.to_string()))?);
    }
    cur.expect("x:")?;
    let x = cur.seq()?;
    cur.expect("y:")?;
    let y = cur.seq()?;
    let gx_line = cur.field("gx")?;
    let gx = parse_index_list(gx_line).map_err(|e| cur.error(e.to_string()))?;
    let gy_line = cur.field("gy")?;
    let gy = parse_index_list(gy_line).map_err(|e| cur.error(e.to_string()))?;
    cur.done()?;
    Ok((
        x,
        y,
        FinitePermWitness {
            gx,
            gy,
            k,
            intervals,
        },
    ))
}

fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|w| {
            w.parse()
                .map_err(|_| Error::Invalid(format!("malformed integer `{w}`")))
        })
        .collect()
}

/// Parses an interval-list flag value such as `0/1,2/1;8/1,10/1`.
pub fn parse_box_spec(text: &str) -> Result<Vec<OpenInterval>> {
    text.split(';')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (lo, hi) = part
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("malformed interval `{part}`")))?;
            OpenInterval::new(parse_ratio(lo.trim())?, parse_ratio(hi.trim())?)
        })
        .collect()
}
