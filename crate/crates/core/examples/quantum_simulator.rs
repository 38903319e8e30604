//! The dense simulator: encoding, Ising evolution, partial trace and Z readout.

use qrc_vol::quantum::{
    build_ising_hamiltonian, encode_input, evolve, partial_trace_first, pauli_z_expectations, propagator, tensor,
    DensityMatrix, IsingSpec,
};

fn main() -> qrc_vol::Result<()> {
    let angles = [0.3, 1.2];
    let input = encode_input(&angles)?;
    println!("<Z> after R_Y encoding: {:?} (cos: {:?})", pauli_z_expectations(&input), angles.map(f64::cos));

    let hidden = DensityMatrix::basis_state(2, 0)?;
    let rho = tensor(&input, &hidden)?;
    let h = build_ising_hamiltonian(&IsingSpec::sample(4, 0, 1.0)?)?;
    let u = propagator(&h, 10.0)?;
    println!("unitarity error {:.2e}", u.unitarity_error());

    let evolved = evolve(&rho, &u)?;
    let reduced = partial_trace_first(&evolved, 2)?;
    println!("hidden register after tau = 10: trace {:.12}, purity {:.4}", reduced.trace().re, reduced.purity());
    println!("hidden <Z>: {:?}", pauli_z_expectations(&reduced));
    Ok(())
}
