//! Optimal interaction time and QSNR across temperatures for a few baths.

use qthermo::metrology;
use qthermo::optimize::{optimal_time, OptimizerConfig};
use qthermo::{OhmicSpectrum, QuadratureConfig};

fn main() -> qthermo::Result<()> {
    let qcfg = QuadratureConfig::default();
    let ocfg = OptimizerConfig::for_time();
    println!("{:>4} {:>9} {:>11} {:>12} {:>9}  kind", "s", "T", "t_opt", "H_opt", "Q_opt");
    for s in [0.5, 1.0, 3.0] {
        let spec = OhmicSpectrum::new(s)?;
        for temp in [0.01, 0.1, 1.0, 10.0] {
            let r = optimal_time(&spec, temp, &ocfg, &qcfg)?;
            let q = metrology::qsnr(temp, r.f_opt)?;
            println!("{s:>4} {temp:>9} {:>11.5} {:>12.5e} {q:>9.6}  {}", r.x_opt, r.f_opt, r.kind.label());
        }
    }
    Ok(())
}
