use serde::{Deserialize, Serialize};

use super::MbqcError;
use crate::qsim::Angle8;

/// Site (row, column). Column 0 holds Bob's input qubits; columns 1..=m are
/// the remotely prepared sites.
pub type Site = (usize, usize);

pub const PATTERN_FORMAT: &str = "q2pc-pattern";
pub const PATTERN_VERSION: u32 = 1;

/// An n×m measurement pattern on the graph: rows are horizontal wires from
/// the input column through columns 1..=m, plus vertical CZ edges inside
/// columns. Angles and dependency sets are indexed [row][column − 1].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickworkPattern {
    pub format: String,
    pub version: u32,
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub phi: Vec<Vec<Angle8>>,
    /// (column, row a, row b), column in 1..=m.
    pub edges: Vec<(usize, usize, usize)>,
    pub x_dep: Vec<Vec<Vec<Site>>>,
    pub z_dep: Vec<Vec<Vec<Site>>>,
    pub input_rows: usize,
}

impl BrickworkPattern {
    /// Pattern with dependency sets derived from the flow f(i, j) = (i, j+1).
    pub fn new(name: &str, phi: Vec<Vec<Angle8>>, edges: Vec<(usize, usize, usize)>) -> Result<Self, MbqcError> {
        let n = phi.len();
        let m = phi.first().map_or(0, |r| r.len());
        let (x_dep, z_dep) = flow_dependencies(n, m, &edges);
        let p = BrickworkPattern {
            format: PATTERN_FORMAT.into(),
            version: PATTERN_VERSION,
            name: name.into(),
            n,
            m,
            phi,
            edges,
            x_dep,
            z_dep,
            input_rows: n,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MbqcError> {
        let bad = |why: String| Err(MbqcError::InvalidPattern(why));
        if self.format != PATTERN_FORMAT || self.version != PATTERN_VERSION {
            return bad(format!("unsupported format {} v{}", self.format, self.version));
        }
        if self.n == 0 || self.m == 0 {
            return bad("pattern needs at least one row and one column".into());
        }
        if self.input_rows != self.n {
            return bad("every row takes one input qubit".into());
        }
        let shape_ok = |v: &Vec<Vec<Vec<Site>>>| v.len() == self.n && v.iter().all(|r| r.len() == self.m);
        if self.phi.len() != self.n || self.phi.iter().any(|r| r.len() != self.m) || !shape_ok(&self.x_dep) || !shape_ok(&self.z_dep) {
            return bad("angle or dependency matrix has the wrong shape".into());
        }
        for &(c, a, b) in &self.edges {
            if c == 0 || c > self.m || a >= self.n || b >= self.n || a == b {
                return bad(format!("bad edge ({c},{a},{b})"));
            }
        }
        for i in 0..self.n {
            for j in 1..=self.m {
                for &(r, c) in self.x_dep[i][j - 1].iter().chain(&self.z_dep[i][j - 1]) {
                    if r >= self.n || c >= j {
                        return bad(format!("dependency ({r},{c}) of site ({i},{j}) does not precede it"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn phi_at(&self, (i, j): Site) -> Angle8 {
        self.phi[i][j - 1]
    }

    /// Vertical edges inside column `col`.
    pub fn column_edges(&self, col: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().filter(move |e| e.0 == col).map(|e| (e.1, e.2))
    }

    /// Every measured site in protocol order: column by column, row by row.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (1..=self.m).flat_map(move |j| (0..self.n).map(move |i| (i, j)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pattern serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, MbqcError> {
        let p: BrickworkPattern = serde_json::from_str(s).map_err(|e| MbqcError::InvalidPattern(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

/// X and Z dependency sets for the row flow f(i, j) = (i, j+1):
/// sX(v) collects u with f(u) = v; sZ(v) collects u with v ∈ N(f(u)) \ {u}.
pub fn flow_dependencies(n: usize, m: usize, edges: &[(usize, usize, usize)]) -> (Vec<Vec<Vec<Site>>>, Vec<Vec<Vec<Site>>>) {
    let mut x = vec![vec![Vec::new(); m]; n];
    let mut z = vec![vec![Vec::new(); m]; n];
    for i in 0..n {
        for j in 1..=m {
            x[i][j - 1].push((i, j - 1));
            if j >= 2 {
                z[i][j - 1].push((i, j - 2));
            }
            for &(c, a, b) in edges {
                if c == j && (a == i || b == i) {
                    let other = if a == i { b } else { a };
                    z[i][j - 1].push((other, j - 1));
                }
            }
            z[i][j - 1].sort();
            z[i][j - 1].dedup();
        }
    }
    (x, z)
}

fn angles(rows: &[&[i64]]) -> Vec<Vec<Angle8>> {
    rows.iter().map(|r| r.iter().map(|&a| Angle8::new(a)).collect()).collect()
}

/// The shipped pattern set.
pub mod library {
    use super::*;

    /// One column at angle 0: the output is the Z measurement of the input.
    pub fn identity() -> BrickworkPattern {
        BrickworkPattern::new("identity", angles(&[&[0]]), vec![]).unwrap()
    }

    /// Single site at angle φ: Z measurement of Rx(−φ)|ψ⟩. With φ = b·π/2
    /// this is the oblivious function evaluation pattern.
    pub fn rx_teleport(phi: Angle8) -> BrickworkPattern {
        BrickworkPattern::new("rx-teleport", vec![vec![phi]], vec![]).unwrap()
    }

    /// Z measurement of H|ψ⟩.
    pub fn hadamard() -> BrickworkPattern {
        BrickworkPattern::new("hadamard", angles(&[&[0, 0]]), vec![]).unwrap()
    }

    /// X-basis readout of Rz(a)|ψ⟩ (Z measurement of H·Rz(a)|ψ⟩).
    pub fn rz(a: Angle8) -> BrickworkPattern {
        BrickworkPattern::new("rz", vec![vec![Angle8::ZERO, -a]], vec![]).unwrap()
    }

    /// Two wires, four columns, CZ bridges in columns 2 and 4.
    pub fn brick() -> BrickworkPattern {
        BrickworkPattern::new("brick", angles(&[&[0, 2, 1, 0], &[0, 0, 6, 2]]), vec![(2, 0, 1), (4, 0, 1)]).unwrap()
    }

    /// All-zero single wire of `m` columns.
    pub fn wire(m: usize) -> BrickworkPattern {
        BrickworkPattern::new("wire", vec![vec![Angle8::ZERO; m]], vec![]).unwrap()
    }

    pub fn by_name(name: &str) -> Option<BrickworkPattern> {
        match name {
            "identity" => Some(identity()),
            "rx-teleport" => Some(rx_teleport(Angle8::QUARTER)),
            "hadamard" => Some(hadamard()),
            "rz" => Some(rz(Angle8::new(1))),
            "brick" => Some(brick()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 5] = ["identity", "rx-teleport", "hadamard", "rz", "brick"];
}
