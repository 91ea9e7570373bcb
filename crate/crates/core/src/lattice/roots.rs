use crate::error::{Error, Result};
use crate::linalg::IMat;

use super::{inner_product, LambdaKind, Lattice, LatticeVector};

/// Ordered simple roots with their Cartan matrix.
#[derive(Clone, Debug)]
pub struct RootSystemBasis {
    pub roots: Vec<LatticeVector>,
    /// Entry (i, j) is 2(r_i, r_j)/(r_j, r_j).
    pub cartan: IMat,
}

impl RootSystemBasis {
    pub fn from_roots(roots: Vec<LatticeVector>) -> Result<Self> {
        let n = roots.len();
        let mut cartan = IMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let rj = inner_product(&roots[j], &roots[j])?;
                let num = 2 * inner_product(&roots[i], &roots[j])?;
                if rj == 0 || num % rj != 0 {
                    return Err(Error::Internal(format!("non-integral Cartan entry ({i},{j})")));
                }
                cartan[(i, j)] = num / rj;
            }
        }
        Ok(RootSystemBasis { roots, cartan })
    }

    /// Pairs (i, j), i < j, joined by an edge of the Dynkin diagram.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.roots.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.cartan[(i, j)] != 0).collect()
    }
}

/// Cartan matrix of a simply-laced diagram given by its edges.
pub fn simply_laced_cartan(n: usize, edges: &[(usize, usize)]) -> IMat {
    let mut c = IMat::identity(n).scale(2);
    for &(a, b) in edges {
        c[(a, b)] = -1;
        c[(b, a)] = -1;
    }
    c
}

/// Diagram edges (0-based) of the simple roots returned by `simple_roots`.
pub fn dynkin_edges(kind: LambdaKind) -> Vec<(usize, usize)> {
    match kind {
        LambdaKind::E8E8 => {
            let one = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)];
            one.iter().copied().chain(one.iter().map(|&(a, b)| (a + 8, b + 8))).collect()
        }
        LambdaKind::Gamma16 => {
            let mut e: Vec<_> = (0..14).map(|i| (i, i + 1)).collect();
            e.push((13, 15));
            e
        }
    }
}

/// The sixteen simple roots as listed in blowdown coordinates, expressed in
/// lattice coordinates with the positive-definite sign.
pub fn simple_roots(kind: LambdaKind) -> RootSystemBasis {
    let d = kind.data();
    let roots = d
        .blowdown_roots()
        .iter()
        .map(|b| {
            let c = d.blowdown_to_lattice(b).expect("listed roots lie in the lattice");
            LatticeVector::new(&d.lattice, c).expect("rank 16")
        })
        .collect();
    RootSystemBasis::from_roots(roots).expect("roots have norm 2")
}

/// Reflection in the hyperplane orthogonal to a root.
pub fn weyl_reflect(root: &LatticeVector, v: &LatticeVector) -> Result<LatticeVector> {
    let rr = inner_product(root, root)?;
    if rr.abs() != 2 {
        return Err(Error::NotARoot(rr));
    }
    let k = 2 * inner_product(v, root)? / rr;
    v.add(&root.scale(-k))
}

/// Matrix (acting on coordinate columns) of the reflection in `root`.
pub fn reflection_matrix(lattice: &Lattice, root: &[i64]) -> Result<IMat> {
    let r = LatticeVector::new(lattice, root.to_vec())?;
    let n = lattice.rank();
    let mut m = IMat::zeros(n, n);
    for j in 0..n {
        let img = weyl_reflect(&r, &lattice.basis_vector(j))?;
        for i in 0..n {
            m[(i, j)] = img.coords()[i];
        }
    }
    Ok(m)
}
