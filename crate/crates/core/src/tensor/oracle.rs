use alloc::string::String;
use alloc::vec::Vec;

use super::{CMatrix, GateOp, SubsystemLayout};
use crate::math::ZERO;
use crate::{Error, Result};

/// Dense full-space matrix of `gate` on `layout`.
///
/// Built as the Kronecker product `U ⊗ I_rest` in the order
/// (targets…, remaining subsystems…) and then conjugated by the permutation
/// that restores layout order. Only the nonzero pattern of the Kronecker
/// product is visited, so memory is one `N × N` matrix.
pub fn kron_oracle(gate: &GateOp, layout: &SubsystemLayout, cap: usize) -> Result<CMatrix> {
    let n = layout.total_dim();
    if n > cap {
        return Err(Error::OracleCapExceeded { dim: n, cap });
    }
    let labels: Vec<&str> = gate.targets().iter().map(String::as_str).collect();
    let targets = layout.positions_of(&labels)?;
    for (&p, &d) in targets.iter().zip(gate.target_dims()) {
        if layout.subsystems()[p].dim != d {
            return Err(Error::DimensionMismatch { expected: layout.subsystems()[p].dim, found: d });
        }
    }
    let rest: Vec<usize> = (0..layout.len()).filter(|p| !targets.contains(p)).collect();
    let order: Vec<usize> = targets.iter().chain(&rest).copied().collect();

    // Permutation from the (targets, rest) ordering back to layout order.
    let reordered = SubsystemLayout::new(order.iter().map(|&p| layout.subsystems()[p].clone()).collect())?;
    let mut to_layout = alloc::vec![0usize; n];
    let mut digits = alloc::vec![0usize; layout.len()];
    for (k, slot) in to_layout.iter_mut().enumerate() {
        for (j, d) in reordered.digits(k).into_iter().enumerate() {
            digits[order[j]] = d;
        }
        *slot = layout.flat_index(&digits);
    }

    let local: usize = gate.target_dims().iter().product();
    let rest_dim = n / local;
    let u = gate.matrix();
    let mut full = CMatrix::zeros(n, n);
    for a in 0..local {
        for b in 0..local {
            let v = u[(a, b)];
            if v == ZERO {
                continue;
            }
            for r in 0..rest_dim {
                let i = a * rest_dim + r;
                let j = b * rest_dim + r;
                full[(to_layout[i], to_layout[j])] = v;
            }
        }
    }
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{ONE, ZERO};

    #[test]
    fn sigma_x_on_first_of_two() {
        let l = SubsystemLayout::builder().aux("p").aux("q").build().unwrap();
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = ONE;
        x[(1, 0)] = ONE;
        let g = GateOp::new(alloc::vec!["p".into()], alloc::vec![2], x).unwrap();
        let full = kron_oracle(&g, &l, 16).unwrap();
        let expect = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]];
        for i in 0..4 {
            for j in 0..4 {
                let e = if expect[i][j] == 1 { ONE } else { ZERO };
                assert_eq!(full[(i, j)], e);
            }
        }
    }

    #[test]
    fn identity_and_cap() {
        let l = SubsystemLayout::builder().cavity("c", 3).aux("q").build().unwrap();
        let g = GateOp::new(alloc::vec!["q".into()], alloc::vec![2], CMatrix::identity(2, 2)).unwrap();
        assert_eq!(kron_oracle(&g, &l, 64).unwrap(), CMatrix::identity(6, 6));
        assert_eq!(
            kron_oracle(&g, &l, 4),
            Err(Error::OracleCapExceeded { dim: 6, cap: 4 })
        );
    }
}
