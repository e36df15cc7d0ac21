//! Finite groups given by a Cayley table.
//!
//! JSON form: `{"order": m, "elements": [...], "table": [[...]], "identity": i}`
//! where `table[a][b]` is the index of the product `a·b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat};

/// Groups above this order have associativity checked on random triples.
const EXHAUSTIVE_ASSOCIATIVITY: usize = 64;
const SAMPLED_TRIPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct FiniteGroup {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl TryFrom<GroupJson> for FiniteGroup {
    type Error = Error;

    fn try_from(j: GroupJson) -> Result<Self> {
        if j.order != j.elements.len() {
            return Err(Error::InvalidGroup(format!(
                "order {} but {} element labels",
                j.order,
                j.elements.len()
            )));
        }
        FiniteGroup::from_table(j.elements, j.table, j.identity)
    }
}

impl From<FiniteGroup> for GroupJson {
    fn from(g: FiniteGroup) -> Self {
        GroupJson {
            order: g.order(),
            elements: g.elements,
            table: g.table,
            identity: g.identity,
        }
    }
}

/// Outcome of the group-axiom checks on a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCheck {
    pub square: bool,
    pub latin: bool,
    pub identity_law: bool,
    pub associative: bool,
    pub first_violation: Option<String>,
}

impl TableCheck {
    pub fn ok(&self) -> bool {
        self.square && self.latin && self.identity_law && self.associative
    }
}

pub fn check_table(table: &[Vec<usize>], identity: usize) -> TableCheck {
    let m = table.len();
    let mut out = TableCheck {
        square: true,
        latin: true,
        identity_law: true,
        associative: true,
        first_violation: None,
    };
    let note = |out: &mut TableCheck, msg: String| {
        if out.first_violation.is_none() {
            out.first_violation = Some(msg);
        }
    };
    if m == 0
        || identity >= m
        || table
            .iter()
            .any(|row| row.len() != m || row.iter().any(|&x| x >= m))
    {
        out.square = false;
        out.latin = false;
        out.identity_law = false;
        out.associative = false;
        note(
            &mut out,
            "table is not an m x m array of element indices".into(),
        );
        return out;
    }
    for a in 0..m {
        let mut row_seen = vec![false; m];
        let mut col_seen = vec![false; m];
        for b in 0..m {
            row_seen[table[a][b]] = true;
            col_seen[table[b][a]] = true;
        }
        if row_seen.iter().chain(&col_seen).any(|s| !s) {
            out.latin = false;
            note(&mut out, format!("row or column {a} is not a permutation"));
        }
        if table[identity][a] != a || table[a][identity] != a {
            out.identity_law = false;
            note(&mut out, format!("identity law fails at element {a}"));
        }
    }
    let assoc = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
    if m <= EXHAUSTIVE_ASSOCIATIVITY {
        'outer: for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if !assoc(a, b, c) {
                        out.associative = false;
                        note(&mut out, format!("({a}·{b})·{c} != {a}·({b}·{c})"));
                        break 'outer;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..SAMPLED_TRIPLES {
            let (a, b, c) = (
                rng.random_range(0..m),
                rng.random_range(0..m),
                rng.random_range(0..m),
            );
            if !assoc(a, b, c) {
                out.associative = false;
                note(&mut out, format!("({a}·{b})·{c} != {a}·({b}·{c})"));
                break;
            }
        }
    }
    out
}

impl FiniteGroup {
    pub fn from_table(
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
        identity: usize,
    ) -> Result<Self> {
        let check = check_table(&table, identity);
        if !check.ok() {
            return Err(Error::InvalidGroup(
                check
                    .first_violation
                    .unwrap_or_else(|| "group axioms fail".into()),
            ));
        }
        Ok(Self::from_table_unchecked(elements, table, identity))
    }

    /// Skips the axiom checks. Only meant for building negative controls;
    /// inverses of a broken table are whatever the row scan finds first.
    pub fn from_table_unchecked(
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
        identity: usize,
    ) -> Self {
        let m = table.len();
        let inverse = (0..m)
            .map(|a| {
                (0..m)
                    .find(|&b| table[a][b] == identity)
                    .unwrap_or(identity)
            })
            .collect();
        FiniteGroup {
            elements,
            table,
            identity,
            inverse,
        }
    }

    /// Builds the table of a group given as a closed list of elements.
    pub fn from_elements<T: PartialEq>(
        labels: Vec<String>,
        items: &[T],
        mul: impl Fn(&T, &T) -> T,
    ) -> Result<Self> {
        let m = items.len();
        let mut table = vec![vec![0; m]; m];
        for a in 0..m {
            for b in 0..m {
                let p = mul(&items[a], &items[b]);
                table[a][b] = items.iter().position(|x| *x == p).ok_or_else(|| {
                    Error::InvalidGroup(format!("product {a}·{b} is not in the list"))
                })?;
            }
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|a| table[e][a] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        FiniteGroup::from_table(labels, table, identity)
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let labels = (0..n).map(|i| format!("r{i}")).collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup::from_table(labels, table, 0)
    }

    /// Dihedral group of order `2n`; element `i + n*j` is `r^i s^j`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 2".into()));
        }
        let items: Vec<(usize, usize)> = (0..2).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
        let labels = items
            .iter()
            .map(|&(i, j)| {
                if j == 0 {
                    format!("r{i}")
                } else {
                    format!("r{i}s")
                }
            })
            .collect();
        FiniteGroup::from_elements(labels, &items, |&(i, a), &(j, b)| {
            let rot = if a == 0 { (i + j) % n } else { (i + n - j) % n };
            (rot, (a + b) % 2)
        })
    }

    /// Symmetric group on `n <= 5` letters, composition `(p·q)(x) = p(q(x))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidGroup(
                "symmetric groups are supported for 1 <= n <= 5".into(),
            ));
        }
        let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
        // lexicographic enumeration
        loop {
            let mut p = perms.last().expect("non-empty").clone();
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
                break;
            };
            let j = (i + 1..n)
                .rev()
                .find(|&j| p[j] > p[i])
                .expect("successor exists");
            p.swap(i, j);
            p[i + 1..].reverse();
            perms.push(p);
        }
        let labels = perms
            .iter()
            .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        FiniteGroup::from_elements(labels, &perms, |p, q| q.iter().map(|&x| p[x]).collect())
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Result<Self> {
        let one = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
        let qi = [c64(0.0, 1.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, -1.0)];
        let qj = [c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.0)];
        let qk = [c64(0.0, 0.0), c64(0.0, 1.0), c64(0.0, 1.0), c64(0.0, 0.0)];
        let mut items = Vec::new();
        let mut labels = Vec::new();
        for (name, q) in [("1", one), ("i", qi), ("j", qj), ("k", qk)] {
            for sign in [1.0, -1.0] {
                items.push(CMat::from_row_slice(2, 2, &q) * c64(sign, 0.0));
                labels.push(if sign > 0.0 {
                    name.to_string()
                } else {
                    format!("-{name}")
                });
            }
        }
        FiniteGroup::from_elements(labels, &items, |a, b| a * b)
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let (m, n) = (a.order(), b.order());
        let labels = (0..m * n)
            .map(|x| format!("({},{})", a.elements[x / n], b.elements[x % n]))
            .collect();
        let table = (0..m * n)
            .map(|x| {
                (0..m * n)
                    .map(|y| a.table[x / n][y / n] * n + b.table[x % n][y % n])
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(labels, table, a.identity * n + b.identity)
    }

    /// `Z<n>`, `D<n>` (order 2n), `S<n>`, `Q8`, or `A x B` products of those.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some((l, r)) = name.split_once('x') {
            return FiniteGroup::direct_product(&Self::by_name(l)?, &Self::by_name(r)?);
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidGroup(format!("unknown group name {name:?}")))
        };
        match name {
            "Q8" => FiniteGroup::quaternion(),
            _ if name.starts_with('Z') => FiniteGroup::cyclic(parse(&name[1..])?),
            _ if name.starts_with('D') => FiniteGroup::dihedral(parse(&name[1..])?),
            _ if name.starts_with('S') => FiniteGroup::symmetric(parse(&name[1..])?),
            _ => Err(Error::InvalidGroup(format!("unknown group name {name:?}"))),
        }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn check(&self) -> TableCheck {
        check_table(&self.table, self.identity)
    }

    /// Permutation matrix of left translation: `L_g e_h = e_{gh}`.
    pub fn left_regular(&self, g: usize) -> CMat {
        let m = self.order();
        let mut p = CMat::zeros(m, m);
        for h in 0..m {
            p[(self.mul(g, h), h)] = c64(1.0, 0.0);
        }
        p
    }
}
