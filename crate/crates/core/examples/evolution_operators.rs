//! S_t and P_t on a grid: direct Mittag-Leffler symbols against the Mainardi
//! representation, and the low/high frequency split of S_t.

use fracdisp::evolution::{apply_P, apply_P_mainardi, apply_S, apply_S_mainardi, apply_S_split, FracParams};
use fracdisp::quadrature::QuadConfig;
use fracdisp::spectral::{lp_norm, Field, SpectralGrid};
use num_complex::Complex64;

fn main() -> fracdisp::Result<()> {
    let fp = FracParams::new(0.6, 1.0, 1, 1.0)?;
    let grid = SpectralGrid::new(1, 80.0, 1024)?;
    let f = Field::from_fn(grid, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0));
    let quad = QuadConfig::default();

    for t in [0.1, 1.0, 5.0] {
        let s = apply_S(&fp, t, &f)?;
        let p = apply_P(&fp, t, &f)?;
        let ds = lp_norm(&s.sub(&apply_S_mainardi(&fp, t, &f, &quad)?)?, 2.0)?;
        let dp = lp_norm(&p.sub(&apply_P_mainardi(&fp, t, &f, &quad)?)?, 2.0)?;
        println!(
            "t = {t}: ||S_t f||_2 = {:.10}, ||P_t f||_2 = {:.10}, Mainardi gaps {ds:.1e} / {dp:.1e}",
            lp_norm(&s, 2.0)?,
            lp_norm(&p, 2.0)?
        );
        let parts = apply_S_split(&fp, t, &f)?;
        let gap = lp_norm(&parts.sum()?.sub(&s)?, 2.0)?;
        println!(
            "        low {:.3e}, leading high term {:.3e}, remainder {:.3e}, reassembly gap {gap:.1e}",
            lp_norm(&parts.low, 2.0)?,
            lp_norm(&parts.mid, 2.0)?,
            lp_norm(&parts.high_remainder, 2.0)?
        );
    }
    Ok(())
}
