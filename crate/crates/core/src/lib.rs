//! Mesoscopic Josephson-junction toolkit.
//!
//! Models the quantum dynamics of small-capacitance Josephson junctions in
//! the regime where the charging energy `E_C` and Josephson coupling `E_J`
//! compete, plus the measurement chain used to read such circuits out:
//!
//! * [`bands`] — charge-basis junction Hamiltonian: energy bands, free
//!   energy, average Cooper-pair number, and junction voltage as periodic
//!   functions of the induced charge `q`;
//! * [`qubit`] — two-level reductions: the charge-qubit gap and the
//!   rf-SQUID double-well flux qubit (well geometry, plasma frequency,
//!   flux bias);
//! * [`flux`] — photon-assisted resonant flux tunneling: a dissipative
//!   3-level model combining coherent drive, intrawell relaxation with
//!   reset, and interwell (bath) relaxation; stationary states and
//!   tunneling rates;
//! * [`detector`] — the single-electron transistor in the resonant-level
//!   regime as a quantum-limited charge detector: output noise, backaction
//!   noise, their cross-correlator, response coefficient, energy
//!   sensitivity, and signal-to-noise figures;
//! * [`numerics`] — the deterministic numerical kernels the physics
//!   modules share.
//!
//! # Units
//!
//! Natural units `ħ = k_B = e = 1` throughout: energies, temperatures,
//! rates, and frequencies share one scale; charge is counted in units of
//! the relevant carrier (Cooper pairs for the junction modules, electrons
//! for the detector). Conversions are the caller's business at the edges.
//!
//! # Determinism
//!
//! Every function in this crate is a pure function of its inputs. There is
//! no global state, no interior randomness, and no floating-point reordering
//! across calls, so identical input bits give identical output bits — the
//! property the CLI leans on to promise reproducible sweep files.

pub mod bands;
pub mod detector;
pub mod flux;
pub mod numerics;
pub mod qubit;
