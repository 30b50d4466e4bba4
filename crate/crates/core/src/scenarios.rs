//! Distinguishability scenarios: groupings of a- and b-photons into mutually
//! orthogonal temporal classes, each internally indistinguishable.
//!
//! A group of `n` a-photons and `m` b-photons contributes `C(n+m, n)` to the
//! bunching enhancement; groups from a single port contribute 1.
//!
//! Labels are written as `+`-joined terms, each `[count]a[count]b` with an
//! omitted count meaning 1 and an omitted letter meaning 0, for example
//! `2a1b+ab+b`. A trailing `x<k>` repeats a term (`abx3` is `ab+ab+ab`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference_engine::{optimal_transmissivity, InputConfiguration};
use crate::temporal_modes::WavePacket;

pub const MAX_ENUMERATION_PORT: usize = 8;

/// Minimum spacing between group centers, in packet widths, for groups to be
/// treated as orthogonal.
pub const MIN_SEPARATION_WIDTHS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Group {
    pub a: usize,
    pub b: usize,
}

impl Group {
    pub fn new(a: usize, b: usize) -> Self {
        Self { a, b }
    }

    pub fn size(&self) -> usize {
        self.a + self.b
    }

    pub fn factor(&self) -> u64 {
        binomial(self.a + self.b, self.a)
    }
}

// Groups order by (size, a-count); scenarios list them largest first.
impl Ord for Group {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.size(), self.a).cmp(&(other.size(), other.a))
    }
}

impl PartialOrd for Group {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter =
            |f: &mut fmt::Formatter<'_>, count: usize, c: char, explicit: bool| match (count, explicit) {
                (0, _) => Ok(()),
                (1, false) => write!(f, "{c}"),
                (k, _) => write!(f, "{k}{c}"),
            };
        let explicit = self.a > 1 || self.b > 1;
        letter(f, self.a, 'a', explicit)?;
        letter(f, self.b, 'b', explicit)
    }
}

/// Multiset of groups, kept in canonical (descending) order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DistinguishabilityScenario {
    groups: Vec<Group>,
}

impl DistinguishabilityScenario {
    pub fn new(groups: impl IntoIterator<Item = Group>) -> Result<Self> {
        let mut groups: Vec<Group> = groups.into_iter().collect();
        if groups.is_empty() {
            return Err(Error::EmptyInput("scenario has no groups"));
        }
        if groups.iter().any(|g| g.size() == 0) {
            return Err(Error::Domain("scenario contains an empty (0,0) group".into()));
        }
        groups.sort_by(|x, y| y.cmp(x));
        Ok(Self { groups })
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(a, b)| Group::new(a, b)))
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// `(N, M)`.
    pub fn totals(&self) -> (usize, usize) {
        self.groups.iter().fold((0, 0), |(n, m), g| (n + g.a, m + g.b))
    }

    /// Same grouping with the ports swapped.
    pub fn mirrored(&self) -> Self {
        Self::new(self.groups.iter().map(|g| Group::new(g.b, g.a))).expect("mirror of a valid scenario")
    }
}

impl fmt::Display for DistinguishabilityScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for DistinguishabilityScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_label(s)
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// `Π_i C(n_i + m_i, n_i)`.
pub fn closed_form_enhancement(scenario: &DistinguishabilityScenario) -> u64 {
    scenario.groups.iter().map(Group::factor).product()
}

pub fn format_label(scenario: &DistinguishabilityScenario) -> String {
    scenario.to_string()
}

pub fn parse_label(text: &str) -> Result<DistinguishabilityScenario> {
    let mut parser = LabelParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut groups = Vec::new();
    loop {
        parser.skip_spaces();
        let (group, repeat) = parser.term()?;
        groups.extend(std::iter::repeat_n(group, repeat));
        parser.skip_spaces();
        match parser.peek() {
            None => break,
            Some(b'+') => parser.pos += 1,
            Some(c) => return Err(parser.error(format!("unexpected character '{}'", c as char))),
        }
    }
    DistinguishabilityScenario::new(groups)
}

struct LabelParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl LabelParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_spaces(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn count(&mut self) -> Result<Option<usize>> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        digits.parse().map(Some).map_err(|_| Error::Parse {
            position: start,
            message: format!("count '{digits}' is too large"),
        })
    }

    // term := [count] 'a' [[count] 'b'] | [count] 'b', then optional 'x' count
    fn term(&mut self) -> Result<(Group, usize)> {
        let start = self.pos;
        let first = self.count()?;
        let (a, b) = match self.peek() {
            Some(b'a') => {
                self.pos += 1;
                let a = first.unwrap_or(1);
                let before_b = self.pos;
                let second = self.count()?;
                if self.peek() == Some(b'b') {
                    self.pos += 1;
                    (a, second.unwrap_or(1))
                } else if second.is_some() {
                    self.pos = before_b;
                    return Err(self.error("count after 'a' must be followed by 'b'"));
                } else {
                    (a, 0)
                }
            }
            Some(b'b') => {
                self.pos += 1;
                (0, first.unwrap_or(1))
            }
            Some(c) => return Err(self.error(format!("expected 'a' or 'b', found '{}'", c as char))),
            None => return Err(self.error("expected a term")),
        };
        if a + b == 0 {
            return Err(Error::Parse {
                position: start,
                message: "term has no photons".into(),
            });
        }
        let mut repeat = 1;
        if matches!(self.peek(), Some(b'x') | Some(b'X')) {
            self.pos += 1;
            let at = self.pos;
            repeat = match self.count()? {
                Some(k) if k > 0 => k,
                _ => {
                    return Err(Error::Parse {
                        position: at,
                        message: "expected a positive repeat count after 'x'".into(),
                    })
                }
            };
        }
        Ok((Group::new(a, b), repeat))
    }
}

/// Every grouping of `n` a-photons and `m` b-photons with its closed-form
/// factor. The list starts at the fully indistinguishable `{(n, m)}` and
/// proceeds in descending lexicographic order of the canonical group
/// sequence; it includes mirror images and the all-distinguishable baseline.
pub fn enumerate_scenarios(n: usize, m: usize) -> Result<Vec<(DistinguishabilityScenario, u64)>> {
    for (what, size) in [("a-photon count", n), ("b-photon count", m)] {
        if size > MAX_ENUMERATION_PORT {
            return Err(Error::Capacity {
                what,
                size,
                max: MAX_ENUMERATION_PORT,
            });
        }
    }
    if n + m == 0 {
        return Err(Error::Domain("no photons to group".into()));
    }

    // Candidate parts, largest first.
    let mut parts: Vec<Group> = (0..=n)
        .flat_map(|a| (0..=m).map(move |b| Group::new(a, b)))
        .filter(|g| g.size() > 0)
        .collect();
    parts.sort_by(|x, y| y.cmp(x));

    let mut out = Vec::new();
    let mut stack = Vec::new();
    partitions(&parts, 0, n, m, &mut stack, &mut out);
    Ok(out
        .into_iter()
        .map(|groups| {
            let s = DistinguishabilityScenario { groups };
            let f = closed_form_enhancement(&s);
            (s, f)
        })
        .collect())
}

// Appends groups drawn from parts[first..] (non-increasing) until (n, m) is
// exhausted.
fn partitions(
    parts: &[Group],
    first: usize,
    n: usize,
    m: usize,
    stack: &mut Vec<Group>,
    out: &mut Vec<Vec<Group>>,
) {
    if n == 0 && m == 0 {
        out.push(stack.clone());
        return;
    }
    for (i, g) in parts.iter().enumerate().skip(first) {
        if g.a <= n && g.b <= m {
            stack.push(*g);
            partitions(parts, i, n - g.a, m - g.b, stack, out);
            stack.pop();
        }
    }
}

/// Scenarios printed in the published enhancement tables, in column order,
/// with their printed factors.
pub fn paper_table(n: usize, m: usize) -> Option<&'static [(&'static str, u64)]> {
    const TWO_TWO: &[(&str, u64)] = &[("2a2b", 6), ("2a1b+1b", 3), ("1ab+1ab", 4), ("1ab+a+b", 2)];
    const THREE_TWO: &[(&str, u64)] = &[
        ("3a2b", 10),
        ("2a2b+a", 6),
        ("3a1b+b", 4),
        ("2a1b+ab", 6),
        ("1a2b+2a", 3),
        ("2a1b+a+b", 3),
        ("ab+a+ab", 4),
        ("ab+a+a+b", 2),
    ];
    const THREE_THREE: &[(&str, u64)] = &[
        ("3a3b", 20),
        ("3a2b+b", 10),
        ("3a1b+2b", 4),
        ("2a2b+ab", 12),
        ("2a2b+a+b", 6),
        ("2a1b+1a2b", 9),
        ("2a1b+1ab+b", 6),
        ("2a1b+a+b+b", 3),
        ("abx3", 8),
        ("abx2+a+b", 4),
        ("ab+b+a+a+b", 2),
    ];
    match (n, m) {
        (2, 2) => Some(TWO_TWO),
        (3, 2) => Some(THREE_TWO),
        (3, 3) => Some(THREE_THREE),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub factor: u64,
    /// The scenario's spelling in the published table, when it appears there.
    pub published_label: Option<&'static str>,
    pub published_factor: Option<u64>,
}

/// All scenarios for `(n, m)`, flagging those that appear in a published
/// table.
pub fn scenario_table(n: usize, m: usize) -> Result<Vec<TableRow>> {
    let published: Vec<(DistinguishabilityScenario, &'static str, u64)> = paper_table(n, m)
        .unwrap_or(&[])
        .iter()
        .map(|&(label, factor)| Ok((parse_label(label)?, label, factor)))
        .collect::<Result<_>>()?;

    Ok(enumerate_scenarios(n, m)?
        .into_iter()
        .map(|(s, factor)| {
            let hit = published.iter().find(|(p, _, _)| *p == s);
            TableRow {
                label: s.to_string(),
                factor,
                published_label: hit.map(|h| h.1),
                published_factor: hit.map(|h| h.2),
            }
        })
        .collect())
}

/// Realizes a scenario as packets: every photon of group `i` sits at
/// `i · group_separation` with the given width, so photons within a group are
/// identical and groups are mutually orthogonal. Transmissivity is set to
/// the detection optimum `N/(N+M)`.
pub fn scenario_to_packets(
    scenario: &DistinguishabilityScenario,
    width: f64,
    group_separation: f64,
) -> Result<InputConfiguration> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidPacket(format!(
            "width must be positive, got {width}"
        )));
    }
    if !(group_separation >= MIN_SEPARATION_WIDTHS * width) {
        return Err(Error::Configuration(format!(
            "group separation {group_separation} is below {MIN_SEPARATION_WIDTHS} packet widths ({})",
            MIN_SEPARATION_WIDTHS * width
        )));
    }
    let mut port_a = Vec::new();
    let mut port_b = Vec::new();
    for (i, g) in scenario.groups.iter().enumerate() {
        let packet = WavePacket::gaussian(i as f64 * group_separation, width)?;
        port_a.extend(std::iter::repeat_n(packet, g.a));
        port_b.extend(std::iter::repeat_n(packet, g.b));
    }
    let (n, m) = scenario.totals();
    InputConfiguration::new(port_a, port_b, optimal_transmissivity(n, m)?)
}
