//! Two-particle Fock bases on three sites and second-quantised operator
//! strings acting on them.
//!
//! Sites are ordered L, M, R. Bosons occupy one band per site. Fermions (the
//! fermionised picture of strongly repelling bosons) occupy modes
//! `L0, M0, R0, L1, M1, R1`, indexed `band * 3 + site`; a basis state
//! `a+_{j0} a+_{k1} |0>` has exactly one particle in each band.

pub const SITES: [&str; 3] = ["L", "M", "R"];

/// Elementary creation or annihilation operator on a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Create(usize),
    Annihilate(usize),
}

/// Product of elementary operators, applied right to left as written.
pub type OpString = Vec<Op>;

/// Occupations `(n_L, n_M, n_R)` with `n_L + n_M + n_R = 2`.
pub type BoseState = [u8; 3];

/// Canonical bosonic basis: doubly occupied sites first, then pairs.
pub const BOSE_BASIS: [BoseState; 6] = [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [1, 0, 1], [0, 1, 1]];

/// Short labels of the bosonic basis.
pub const BOSE_LABELS: [&str; 6] = ["LL", "MM", "RR", "LM", "LR", "MR"];

pub fn bose_index(s: &BoseState) -> Option<usize> {
    BOSE_BASIS.iter().position(|b| b == s)
}

/// Applies an operator string to a bosonic Fock state.
pub fn apply_bose(ops: &[Op], state: &BoseState) -> Option<(BoseState, f64)> {
    let mut occ = [state[0] as i32, state[1] as i32, state[2] as i32];
    let mut amp = 1.0;
    for op in ops.iter().rev() {
        match *op {
            Op::Create(m) => {
                occ[m] += 1;
                amp *= (occ[m] as f64).sqrt();
            }
            Op::Annihilate(m) => {
                if occ[m] == 0 {
                    return None;
                }
                amp *= (occ[m] as f64).sqrt();
                occ[m] -= 1;
            }
        }
    }
    if occ.iter().any(|&n| !(0..=2).contains(&n)) {
        return None;
    }
    Some(([occ[0] as u8, occ[1] as u8, occ[2] as u8], amp))
}

/// Mode index of `site` in `band`.
pub const fn fermi_mode(site: usize, band: usize) -> usize {
    band * 3 + site
}

/// Occupation bitmask of the six fermionic modes.
pub type FermiState = u8;

/// Canonical fermionic basis: `(ground site j, excited site k)` at `3 j + k`.
pub fn fermi_basis() -> [FermiState; 9] {
    let mut out = [0u8; 9];
    for j in 0..3 {
        for k in 0..3 {
            out[3 * j + k] = (1 << fermi_mode(j, 0)) | (1 << fermi_mode(k, 1));
        }
    }
    out
}

pub fn fermi_labels() -> [String; 9] {
    std::array::from_fn(|i| format!("{}0{}1", SITES[i / 3], SITES[i % 3]))
}

pub fn fermi_index(s: FermiState) -> Option<usize> {
    fermi_basis().iter().position(|&b| b == s)
}

/// Applies an operator string to a fermionic state, Jordan-Wigner signs
/// ordered by mode index.
pub fn apply_fermi(ops: &[Op], state: FermiState) -> Option<(FermiState, f64)> {
    let mut s = state;
    let mut sign = 1.0;
    for op in ops.iter().rev() {
        let (m, create) = match *op {
            Op::Create(m) => (m, true),
            Op::Annihilate(m) => (m, false),
        };
        let bit = 1u8 << m;
        let occupied = s & bit != 0;
        if occupied == create {
            return None;
        }
        if (s & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        s ^= bit;
    }
    Some((s, sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bose_pair_hop_amplitude() {
        // b_M^+ b_L |2,0,0> = sqrt(2) |1,1,0>
        let (s, a) = apply_bose(&[Op::Create(1), Op::Annihilate(0)], &[2, 0, 0]).unwrap();
        assert_eq!(s, [1, 1, 0]);
        assert!((a - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fermi_anticommutation() {
        // a+_0 a+_3 |0> = - a+_3 a+_0 |0>
        let (s1, a1) = apply_fermi(&[Op::Create(0), Op::Create(3)], 0).unwrap();
        let (s2, a2) = apply_fermi(&[Op::Create(3), Op::Create(0)], 0).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(a1, -a2);
        // The canonical basis state carries sign +1.
        assert_eq!(a1, 1.0);
        assert!(apply_fermi(&[Op::Create(0)], 1).is_none());
    }

    #[test]
    fn labels() {
        assert_eq!(fermi_labels()[1], "L0M1");
        assert_eq!(fermi_basis()[4], (1 << 1) | (1 << 4));
    }
}
