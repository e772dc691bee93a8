//! Lattice specifications: a small line-based text format describing sites,
//! weighted edges, labelled triangles, and the singlet matching used as the
//! initial state, plus the invariant checker behind `lattice validate`.

use std::collections::HashSet;

use crate::error::{Result, SpinNetError};

/// A Hamiltonian graph: sites, weighted edges, optional labelled triangles,
/// and an optional singlet matching (site indices are 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub triangles: Vec<(String, [usize; 3])>,
    pub singlet_matching: Vec<(usize, usize)>,
}

/// One validation check outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl LatticeSpec {
    /// Parse the text format:
    /// ```text
    /// sites 18
    /// edge 0 1 1.0
    /// triangle a 0 1 2
    /// singlet 0 1
    /// ```
    /// `#` starts a comment; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut triangles = Vec::new();
        let mut singlets = Vec::new();
        for (li, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SpinNetError::Parse {
                line: li + 1,
                message,
            };
            let mut toks = line.split_whitespace();
            let keyword = toks.next().unwrap();
            let rest: Vec<&str> = toks.collect();
            match keyword {
                "sites" => {
                    let v = rest
                        .first()
                        .ok_or_else(|| err("expected `sites <count>`".into()))?;
                    n = Some(
                        v.parse()
                            .map_err(|_| err(format!("bad site count {v:?}")))?,
                    );
                }
                "edge" => {
                    if rest.len() != 3 {
                        return Err(err("expected `edge <a> <b> <coupling>`".into()));
                    }
                    let a = rest[0]
                        .parse()
                        .map_err(|_| err(format!("bad site index {:?}", rest[0])))?;
                    let b = rest[1]
                        .parse()
                        .map_err(|_| err(format!("bad site index {:?}", rest[1])))?;
                    let w = rest[2]
                        .parse()
                        .map_err(|_| err(format!("bad coupling {:?}", rest[2])))?;
                    edges.push((a, b, w));
                }
                "triangle" => {
                    if rest.len() != 4 {
                        return Err(err("expected `triangle <label> <a> <b> <c>`".into()));
                    }
                    let mut sites = [0usize; 3];
                    for (slot, tok) in sites.iter_mut().zip(&rest[1..]) {
                        *slot = tok
                            .parse()
                            .map_err(|_| err(format!("bad site index {tok:?}")))?;
                    }
                    triangles.push((rest[0].to_string(), sites));
                }
                "singlet" => {
                    if rest.len() != 2 {
                        return Err(err("expected `singlet <a> <b>`".into()));
                    }
                    let a = rest[0]
                        .parse()
                        .map_err(|_| err(format!("bad site index {:?}", rest[0])))?;
                    let b = rest[1]
                        .parse()
                        .map_err(|_| err(format!("bad site index {:?}", rest[1])))?;
                    singlets.push((a, b));
                }
                other => return Err(err(format!("unknown keyword {other:?}"))),
            }
        }
        let n = n.ok_or(SpinNetError::Parse {
            line: 0,
            message: "missing `sites <count>` line".into(),
        })?;
        Ok(LatticeSpec {
            n,
            edges,
            triangles,
            singlet_matching: singlets,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("sites {}\n", self.n));
        for (a, b, w) in &self.edges {
            out.push_str(&format!("edge {a} {b} {w}\n"));
        }
        for (label, t) in &self.triangles {
            out.push_str(&format!("triangle {label} {} {} {}\n", t[0], t[1], t[2]));
        }
        for (a, b) in &self.singlet_matching {
            out.push_str(&format!("singlet {a} {b}\n"));
        }
        out
    }

    fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(a, b, _)| (a.min(b), a.max(b)))
            .collect()
    }

    /// Run every invariant check; Kagome-specific checks (degree 4, triangle
    /// counts, singlet matching) are applied when triangles are present.
    pub fn validate(&self) -> Vec<Check> {
        let mut checks = Vec::new();

        let bad_sites: Vec<String> = self
            .edges
            .iter()
            .filter(|(a, b, _)| *a >= self.n || *b >= self.n)
            .map(|(a, b, _)| format!("({a},{b})"))
            .collect();
        checks.push(Check::new(
            "edges reference valid sites",
            bad_sites.is_empty(),
            if bad_sites.is_empty() {
                format!("{} edges over {} sites", self.edges.len(), self.n)
            } else {
                format!("out-of-range edges: {}", bad_sites.join(", "))
            },
        ));

        let loops: Vec<String> = self
            .edges
            .iter()
            .filter(|(a, b, _)| a == b)
            .map(|(a, _, _)| format!("({a},{a})"))
            .collect();
        checks.push(Check::new(
            "no self-loops",
            loops.is_empty(),
            if loops.is_empty() {
                "ok".into()
            } else {
                format!("self-loops: {}", loops.join(", "))
            },
        ));

        let mut seen = HashSet::new();
        let dups: Vec<String> = self
            .edges
            .iter()
            .filter(|(a, b, _)| !seen.insert((*a.min(b), *a.max(b))))
            .map(|(a, b, _)| format!("({a},{b})"))
            .collect();
        checks.push(Check::new(
            "no duplicate edges",
            dups.is_empty(),
            if dups.is_empty() {
                "ok".into()
            } else {
                format!("duplicates: {}", dups.join(", "))
            },
        ));

        if !self.triangles.is_empty() {
            let mut degree = vec![0usize; self.n];
            for (a, b, _) in &self.edges {
                if *a < self.n && *b < self.n && a != b {
                    degree[*a] += 1;
                    degree[*b] += 1;
                }
            }
            let off: Vec<String> = degree
                .iter()
                .enumerate()
                .filter(|(_, d)| **d != 4)
                .map(|(s, d)| format!("site {s} has degree {d}"))
                .collect();
            checks.push(Check::new(
                "every site has degree 4",
                off.is_empty(),
                if off.is_empty() {
                    "ok".into()
                } else {
                    off.join("; ")
                },
            ));

            checks.push(Check::new(
                "edge count equals 3 x triangle count",
                self.edges.len() == 3 * self.triangles.len(),
                format!(
                    "{} edges vs {} triangles",
                    self.edges.len(),
                    self.triangles.len()
                ),
            ));

            let mut tri_count = vec![0usize; self.n];
            for (_, t) in &self.triangles {
                for &s in t {
                    if s < self.n {
                        tri_count[s] += 1;
                    }
                }
            }
            let off: Vec<String> = tri_count
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 2)
                .map(|(s, c)| format!("site {s} is in {c} triangles"))
                .collect();
            checks.push(Check::new(
                "every site belongs to exactly 2 triangles",
                off.is_empty(),
                if off.is_empty() {
                    "ok".into()
                } else {
                    off.join("; ")
                },
            ));

            let edge_set = self.edge_set();
            let missing: Vec<String> = self
                .triangles
                .iter()
                .flat_map(|(label, t)| {
                    [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])]
                        .into_iter()
                        .filter(|(a, b)| !edge_set.contains(&((*a).min(*b), (*a).max(*b))))
                        .map(|(a, b)| format!("{label}: ({a},{b})"))
                        .collect::<Vec<_>>()
                })
                .collect();
            checks.push(Check::new(
                "triangle sides are lattice edges",
                missing.is_empty(),
                if missing.is_empty() {
                    "ok".into()
                } else {
                    format!("missing: {}", missing.join(", "))
                },
            ));
        }

        if !self.singlet_matching.is_empty() || !self.triangles.is_empty() {
            let mut covered = vec![0usize; self.n];
            for (a, b) in &self.singlet_matching {
                if *a < self.n {
                    covered[*a] += 1;
                }
                if *b < self.n {
                    covered[*b] += 1;
                }
            }
            let off: Vec<String> = covered
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 1)
                .map(|(s, c)| format!("site {s} covered {c} times"))
                .collect();
            checks.push(Check::new(
                "singlet matching is perfect",
                off.is_empty(),
                if off.is_empty() {
                    format!("{} singlets cover {} sites", self.singlet_matching.len(), self.n)
                } else {
                    off.join("; ")
                },
            ));

            let edge_set = self.edge_set();
            let off: Vec<String> = self
                .singlet_matching
                .iter()
                .filter(|(a, b)| !edge_set.contains(&((*a).min(*b), (*a).max(*b))))
                .map(|(a, b)| format!("({a},{b})"))
                .collect();
            checks.push(Check::new(
                "singlets lie on lattice edges",
                off.is_empty(),
                if off.is_empty() {
                    "ok".into()
                } else {
                    format!("non-edges: {}", off.join(", "))
                },
            ));
        }

        checks
    }

    /// Error with every failed check listed, or Ok.
    pub fn validate_strict(&self) -> Result<()> {
        let failures: Vec<String> = self
            .validate()
            .into_iter()
            .filter(|c| !c.passed)
            .map(|c| format!("- {}: {}", c.name, c.detail))
            .collect();
        if failures.is_empty() {
            Ok(())
        } else {
            Err(SpinNetError::LatticeInvalid(failures.join("\n")))
        }
    }

    /// The default 18-site periodic Kagome cluster: a 3x2 grid of unit cells
    /// with a 3-site basis (A, B, C). Up triangles sit inside each cell and
    /// carry labels a-f; down triangles connect neighbouring cells and carry
    /// A-F. The singlet matching pairs A-B in the bottom row of cells, A-C in
    /// the top row, and closes with C-B links across rows.
    pub fn kagome18_default() -> Self {
        const LX: usize = 3;
        const LY: usize = 2;
        let site = |x: usize, y: usize, s: usize| ((y % LY) * LX + (x % LX)) * 3 + s;
        let (a, b, c) = (0usize, 1usize, 2usize);

        let mut edges = Vec::new();
        let mut triangles = Vec::new();
        for y in 0..LY {
            for x in 0..LX {
                let idx = y * LX + x;
                let up_label = char::from(b'a' + idx as u8).to_string();
                let (sa, sb, sc) = (site(x, y, a), site(x, y, b), site(x, y, c));
                triangles.push((up_label, [sa, sb, sc]));
                edges.push((sa, sb, 1.0));
                edges.push((sb, sc, 1.0));
                edges.push((sc, sa, 1.0));

                let down_label = char::from(b'A' + idx as u8).to_string();
                let (da, db, dc) = (
                    site(x, y, b),
                    site(x + 1, y, a),
                    site(x + 1, (y + LY - 1) % LY, c),
                );
                triangles.push((down_label, [da, db, dc]));
                edges.push((da, db, 1.0));
                edges.push((db, dc, 1.0));
                edges.push((dc, da, 1.0));
            }
        }
        // Sort triangles so a-f precede A-F in the ansatz ordering.
        triangles.sort_by(|x, y| {
            let rank = |l: &str| {
                let ch = l.chars().next().unwrap();
                (ch.is_ascii_uppercase(), ch)
            };
            rank(&x.0).cmp(&rank(&y.0))
        });

        let mut singlets = Vec::new();
        for x in 0..LX {
            singlets.push((site(x, 0, a), site(x, 0, b)));
            singlets.push((site(x, 1, a), site(x, 1, c)));
            singlets.push((site(x, 0, c), site((x + LX - 1) % LX, 1, b)));
        }

        LatticeSpec {
            n: LX * LY * 3,
            edges,
            triangles,
            singlet_matching: singlets,
        }
    }
}

/// Ordered triangle site-triples for the Kagome ansatz: lower-case labels
/// first (a-f), then upper-case (A-F), each group alphabetical.
pub fn kagome_gate_order(spec: &LatticeSpec) -> Vec<[usize; 3]> {
    let mut tris = spec.triangles.clone();
    tris.sort_by(|x, y| {
        let rank = |l: &str| {
            let ch = l.chars().next().unwrap();
            (ch.is_ascii_uppercase(), ch)
        };
        rank(&x.0).cmp(&rank(&y.0))
    });
    tris.into_iter().map(|(_, t)| t).collect()
}
