//! Fermionic occupation-number basis and Jordan-Wigner sign bookkeeping.
//!
//! Basis states are bit masks over 2n modes, site-major: mode 2x is the
//! spin-up orbital of site x and mode 2x+1 its spin-down orbital. A state
//! `s` represents the ket built by applying creation operators in
//! increasing mode order to the vacuum, so the per-site codes read
//! 0 = empty, 1 = up, 2 = down, 3 = doubly occupied.

/// Apply a single creation (`create = true`) or annihilation operator for
/// `mode` to basis state `state`. Returns the resulting state and the
/// fermionic string sign, or None when the operator annihilates the state.
pub fn apply_mode(create: bool, mode: usize, state: usize) -> Option<(f64, usize)> {
    let occupied = (state >> mode) & 1 == 1;
    if create == occupied {
        return None;
    }
    let parity = (state & ((1usize << mode) - 1)).count_ones() & 1;
    let sign = if parity == 1 { -1.0 } else { 1.0 };
    Some((sign, state ^ (1 << mode)))
}

/// Apply the on-site pair annihilator b_x = a_{x,down} a_{x,up}.
///
/// The Jordan-Wigner strings of the two factors run over the same preceding
/// modes and cancel, which the debug assertion checks: the composite always
/// carries sign +1 and is purely local.
pub fn apply_pair_annihilator(site: usize, state: usize) -> Option<usize> {
    let (s1, t1) = apply_mode(false, 2 * site, state)?;
    let (s2, t2) = apply_mode(false, 2 * site + 1, t1)?;
    debug_assert_eq!(s1 * s2, 1.0);
    Some(t2)
}

/// Apply the on-site pair creator b_x^dagger = a_{x,up}^* a_{x,down}^*.
pub fn apply_pair_creator(site: usize, state: usize) -> Option<usize> {
    let (s1, t1) = apply_mode(true, 2 * site + 1, state)?;
    let (s2, t2) = apply_mode(true, 2 * site, t1)?;
    debug_assert_eq!(s1 * s2, 1.0);
    Some(t2)
}

/// Occupations (n_up, n_down) of `site` in `state`.
pub fn site_occupation(site: usize, state: usize) -> (u32, u32) {
    (
        ((state >> (2 * site)) & 1) as u32,
        ((state >> (2 * site + 1)) & 1) as u32,
    )
}
