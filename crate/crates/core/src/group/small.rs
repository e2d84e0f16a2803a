//! Finite groups given explicitly by a Cayley table.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ElementSpec, Enumerable, FiniteGroup, ParseElement};
use crate::error::{Error, Result};

/// Orders up to this bound get an exhaustive associativity check.
const EXHAUSTIVE_ASSOCIATIVITY_ORDER: usize = 64;
const RANDOM_ASSOCIATIVITY_TRIALS: usize = 10_000;

/// An enumerated group: elements are `0..order`, element 0 is the identity
/// and `table[i * order + j]` is the index of `element_i · element_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallGroup {
    order: usize,
    table: Arc<[u32]>,
    inverses: Arc<[u32]>,
    name: Arc<str>,
}

impl SmallGroup {
    /// Validate a Cayley table and build the group.
    ///
    /// Identity and inverses are checked eagerly; associativity exhaustively
    /// for order ≤ 64 and on 10⁴ pseudo-random triples above that.
    pub fn from_table(order: usize, table: Vec<u32>, name: impl Into<String>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("group order must be at least 1".into()));
        }
        if table.len() != order * order {
            return Err(Error::Domain(format!(
                "Cayley table for order {order} needs {} entries, got {}",
                order * order,
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&e| e as usize >= order) {
            return Err(Error::Domain(format!("table entry {bad} out of range 0..{order}")));
        }
        for a in 0..order {
            if table[a] as usize != a || table[a * order] as usize != a {
                return Err(Error::Domain(format!(
                    "element 0 is not a two-sided identity (fails at element {a})"
                )));
            }
        }
        let mut inverses = vec![0u32; order];
        for a in 0..order {
            let row = &table[a * order..(a + 1) * order];
            let b = row.iter().position(|&e| e == 0).ok_or_else(|| {
                Error::Domain(format!("element {a} has no right inverse"))
            })?;
            if table[b * order + a] != 0 {
                return Err(Error::Domain(format!(
                    "right inverse {b} of element {a} is not a left inverse"
                )));
            }
            inverses[a] = b as u32;
        }
        let group = SmallGroup {
            order,
            table: table.into(),
            inverses: inverses.into(),
            name: name.into().into(),
        };
        group.check_associativity()?;
        Ok(group)
    }

    fn check_associativity(&self) -> Result<()> {
        let m = self.order;
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            let left = self.mul(self.mul(a, b), c);
            let right = self.mul(a, self.mul(b, c));
            if left != right {
                return Err(Error::Domain(format!(
                    "table is not associative: ({a}·{b})·{c} = {left} but {a}·({b}·{c}) = {right}"
                )));
            }
            Ok(())
        };
        if m <= EXHAUSTIVE_ASSOCIATIVITY_ORDER {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ca11);
            for _ in 0..RANDOM_ASSOCIATIVITY_TRIALS {
                check(
                    rng.random_range(0..m),
                    rng.random_range(0..m),
                    rng.random_range(0..m),
                )?;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn size(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The cyclic group Z_m under addition.
    pub fn cyclic(m: usize) -> Result<Self> {
        let table = (0..m)
            .flat_map(|a| (0..m).map(move |b| ((a + b) % m) as u32))
            .collect();
        Self::from_table(m, table, format!("Z_{m}"))
    }

    /// The direct product `self × other`, element `(a, b)` at index `a·|other| + b`.
    pub fn direct_product(&self, other: &SmallGroup) -> Result<Self> {
        let (m1, m2) = (self.order, other.order);
        let m = m1 * m2;
        let mut table = Vec::with_capacity(m * m);
        for x in 0..m {
            for y in 0..m {
                let a = self.mul(x / m2, y / m2);
                let b = other.mul(x % m2, y % m2);
                table.push((a * m2 + b) as u32);
            }
        }
        Self::from_table(m, table, format!("{}x{}", self.name, other.name))
    }

    /// The symmetric group on `k` letters (permutations in lexicographic
    /// order; index 0 is the identity). Product `σ·τ` applies σ first.
    pub fn symmetric(k: usize) -> Result<Self> {
        let perms = permutations(k);
        let lookup: std::collections::HashMap<Vec<usize>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let m = perms.len();
        let mut table = Vec::with_capacity(m * m);
        for s in &perms {
            for t in &perms {
                let st: Vec<usize> = (0..k).map(|i| t[s[i]]).collect();
                table.push(lookup[&st] as u32);
            }
        }
        Self::from_table(m, table, format!("S_{k}"))
    }

    /// Cayley table of any enumerable group.
    pub fn from_group<G: Enumerable>(group: &G, limit: usize) -> Result<Self> {
        let m = group.enumerable_size(limit)?;
        let elems: Vec<G::Elem> = (0..m).map(|i| group.element(i)).collect();
        let mut table = Vec::with_capacity(m * m);
        for a in &elems {
            for b in &elems {
                table.push(group.index_of(&group.multiply(a, b)) as u32);
            }
        }
        Self::from_table(m, table, group.label())
    }

    /// Parse the text Cayley-table format: line 1 is the order m, lines
    /// 2..m+1 hold m whitespace-separated 0-based indices each.
    pub fn parse_cayley(text: &str, name: impl Into<String>) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (order, first_line) = loop {
            match lines.next() {
                Some((_, line)) if line.trim().is_empty() => continue,
                Some((ln, line)) => {
                    let tok = line.trim();
                    let col = line.find(tok).unwrap_or(0) + 1;
                    let m: usize = tok.parse().map_err(|_| Error::Parse {
                        line: ln + 1,
                        column: col,
                        message: format!("expected group order, found {tok:?}"),
                    })?;
                    break (m, ln + 1);
                }
                None => {
                    return Err(Error::Parse {
                        line: 1,
                        column: 1,
                        message: "empty Cayley table".into(),
                    })
                }
            }
        };
        if order == 0 {
            return Err(Error::Parse {
                line: first_line,
                column: 1,
                message: "group order must be positive".into(),
            });
        }
        let mut table = Vec::with_capacity(order * order);
        let mut rows = 0;
        for (ln, line) in lines {
            if rows == order {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::Parse {
                    line: ln + 1,
                    column: 1,
                    message: format!("unexpected content after {order} table rows"),
                });
            }
            let mut count = 0;
            for (col, tok) in tokens_with_columns(line) {
                let v: usize = tok.parse().map_err(|_| Error::Parse {
                    line: ln + 1,
                    column: col,
                    message: format!("expected element index, found {tok:?}"),
                })?;
                if v >= order {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: col,
                        message: format!("index {v} out of range 0..{order}"),
                    });
                }
                count += 1;
                if count > order {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: col,
                        message: format!("row has more than {order} entries"),
                    });
                }
                table.push(v as u32);
            }
            if count < order {
                return Err(Error::Parse {
                    line: ln + 1,
                    column: line.len() + 1,
                    message: format!("row has {count} entries, expected {order}"),
                });
            }
            rows += 1;
        }
        if rows < order {
            return Err(Error::Parse {
                line: first_line + rows + 1,
                column: 1,
                message: format!("expected {order} table rows, found {rows}"),
            });
        }
        Self::from_table(order, table, name)
    }

    /// Render in the text Cayley-table format.
    pub fn to_cayley_text(&self) -> String {
        let mut s = format!("{}\n", self.order);
        for a in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|b| self.mul(a, b).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..k {
        for rest in permutations(k - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|r| if r >= first { r + 1 } else { r }));
            out.push(p);
        }
    }
    out
}

impl FiniteGroup for SmallGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        0
    }

    fn multiply(&self, x: &usize, y: &usize) -> usize {
        self.mul(*x, *y)
    }

    fn inverse(&self, x: &usize) -> usize {
        self.inverses[*x] as usize
    }

    fn contains(&self, x: &usize) -> bool {
        *x < self.order
    }

    fn order(&self) -> Option<u128> {
        Some(self.order as u128)
    }

    fn ln_order(&self) -> f64 {
        (self.order as f64).ln()
    }

    fn uniform_element<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.order)
    }

    fn label(&self) -> String {
        self.name.to_string()
    }
}

impl Enumerable for SmallGroup {
    fn index_of(&self, x: &usize) -> usize {
        *x
    }

    fn element(&self, index: usize) -> usize {
        index
    }

    fn multiply_index(&self, a: usize, b: usize) -> usize {
        self.mul(a, b)
    }
}

impl ParseElement for SmallGroup {
    fn parse_element(&self, spec: &ElementSpec) -> Result<usize> {
        match spec {
            ElementSpec::Index(i) if *i < self.order => Ok(*i),
            ElementSpec::Index(i) => Err(Error::Domain(format!(
                "element index {i} out of range for group of order {}",
                self.order
            ))),
            ElementSpec::Entries(_) => Err(Error::Domain(
                "Cayley-table elements must be given as indices".into(),
            )),
        }
    }
}
