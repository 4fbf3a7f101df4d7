//! Sweeps the cylinder length through the sign change at `L = π²/2`.

use diraclab::cli::{cmd_sweep, parse_sweep, sweep_csv};
use diraclab::scenarios::PolicyOverrides;
use diraclab::spin_fourier::SpinStructure;

pub fn main() {
    let spec = parse_sweep("L=4:6:0.25").unwrap();
    let flags = PolicyOverrides { intervals: Some(128), ..PolicyOverrides::default() };
    let rows = cmd_sweep(&spec, SpinStructure::NonBounding, "RoundSphere", &flags).unwrap();
    print!("{}", sweep_csv(&rows));
}
