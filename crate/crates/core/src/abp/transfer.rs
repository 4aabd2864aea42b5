use crate::algebra::{BlockUpper, LayeredRing, Matrix, Ring};

use super::{Abp, AbpError};

/// Block-superdiagonal transfer matrices of a homogeneous program.
///
/// For a program with `k` layers and boundary sizes `w_0..w_k`, `A_v` has the
/// coefficient matrix of `x_v` in layer `i` as block `(i-1, i)`. A product
/// `A_{v_1} ... A_{v_r}` is supported on blocks `(a, a+r)`, so its corner
/// entry (block `(0,k)`, entry `(0, w_k - 1)`) vanishes unless `r = k`, and for
/// `r = k` it is the coefficient of the word `y_{v_1} ... y_{v_k}`.
#[derive(Clone, Debug)]
pub struct TransferMatrices<R: Ring> {
    ring: LayeredRing<R>,
    mats: Vec<BlockUpper<R::Elem>>,
}

/// Builds `A_1..A_n`, each multiplied by `scale[v]` when a point is given.
pub fn transfer_matrices<R: Ring>(
    base: &R,
    abp: &Abp,
    scale: Option<&[R::Elem]>,
) -> Result<TransferMatrices<R>, AbpError> {
    if !abp.is_homogeneous() {
        let (layer, row, col) = first_affine(abp);
        return Err(AbpError::NotHomogeneous { layer, row, col });
    }
    if let Some(s) = scale {
        if s.len() != abp.nvars() {
            return Err(crate::circuit::CircuitError::Arity { expected: abp.nvars(), got: s.len() }.into());
        }
    }
    let ring = LayeredRing::new(base.clone(), abp.widths());
    let mut mats = Vec::with_capacity(abp.nvars());
    for v in 0..abp.nvars() {
        let mut acc = ring.zero();
        for (i, layer) in abp.layers().iter().enumerate() {
            let coeffs = layer.coefficient_matrix(Some(v));
            if coeffs.iter().all(num_traits::Zero::is_zero) {
                continue;
            }
            let mut m = Matrix::from_vec(layer.rows(), layer.cols(), coeffs.iter().map(|c| base.from_bigint(c)).collect());
            if let Some(s) = scale {
                m = m.map(|x| base.mul(&s[v], x));
            }
            acc = ring.add(&acc, &ring.from_block(i, i + 1, m));
        }
        mats.push(acc);
    }
    Ok(TransferMatrices { ring, mats })
}

fn first_affine(abp: &Abp) -> (usize, usize, usize) {
    for (i, l) in abp.layers().iter().enumerate() {
        for r in 0..l.rows() {
            for c in 0..l.cols() {
                if !l.get(r, c).is_homogeneous() {
                    return (i + 1, r, c);
                }
            }
        }
    }
    (0, 0, 0)
}

impl<R: Ring> TransferMatrices<R> {
    pub fn ring(&self) -> &LayeredRing<R> {
        &self.ring
    }

    pub fn mats(&self) -> &[BlockUpper<R::Elem>] {
        &self.mats
    }

    pub fn into_parts(self) -> (LayeredRing<R>, Vec<BlockUpper<R::Elem>>) {
        (self.ring, self.mats)
    }

    /// Number of layers of the underlying program.
    pub fn degree(&self) -> usize {
        self.ring.layers() - 1
    }

    pub fn corner(&self, x: &BlockUpper<R::Elem>) -> R::Elem {
        self.ring.corner(x)
    }

    /// Corner entry of `A_{w_1} ... A_{w_r}`.
    pub fn word_corner(&self, word: &[usize]) -> R::Elem {
        let mut acc = self.ring.one();
        for &v in word {
            acc = self.ring.mul(&acc, &self.mats[v]);
        }
        self.ring.corner(&acc)
    }

    /// Dimension of the uniformly padded form: `(k+1)·w` with `w` the maximum width.
    pub fn padded_dim(&self) -> usize {
        self.ring.layers() * self.ring.sizes().iter().copied().max().unwrap_or(1)
    }

    /// The uniformly padded `(k+1)w × (k+1)w` matrix of `A_v`, read at `(0, (k+1)w - 1)`.
    ///
    /// Node `c` of boundary `b` sits at `b·w + c`, except on the last boundary
    /// where nodes are right-aligned so that the sink lands in the last column.
    pub fn padded(&self, v: usize) -> Matrix<R::Elem> {
        let sizes = self.ring.sizes();
        let w = sizes.iter().copied().max().unwrap_or(1);
        let l = sizes.len();
        let pos = |b: usize, c: usize| if b == l - 1 { b * w + (w - sizes[b]) + c } else { b * w + c };
        let base = self.ring.base();
        let mut out = Matrix::zeros(base, l * w, l * w);
        for b in 0..l {
            for a in 0..=b {
                if let Some(m) = self.mats[v].block(a, b) {
                    for r in 0..m.rows() {
                        for c in 0..m.cols() {
                            out.set(pos(a, r), pos(b, c), m.get(r, c).clone());
                        }
                    }
                }
            }
        }
        out
    }
}
