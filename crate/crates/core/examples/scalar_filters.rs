//! Receive filter, error covariance and MSE weight for a two-user scalar
//! channel, printed next to their closed forms.

use std::f64::consts::LN_2;

use wmmse_ic::filters::{error_covariance, mmse_receiver, mse_weights};
use wmmse_ic::{ChannelSet, CMat, NetworkDims, RateWeights, C64};

fn scalar(x: f64) -> CMat {
    CMat::from_element(1, 1, C64::new(x, 0.0))
}

fn main() -> wmmse_ic::Result<()> {
    let dims = NetworkDims::new(2, 1, 1, 1)?;
    // H_ji for (j, i) = (0,0), (0,1), (1,0), (1,1)
    let gains = [1.0, 0.4, 0.3, 0.8];
    let channels = ChannelSet::from_matrices(dims, 1.0, gains.iter().map(|&g| scalar(g)).collect())?;
    let v = [scalar(1.0), scalar(0.7)];

    for k in 0..2 {
        let (direct, cross) = (gains[3 * k], gains[1 + k]);
        let other = v[1 - k][(0, 0)].re;
        let own = v[k][(0, 0)].re;
        let phi = 1.0 + (cross * other).powi(2);
        let sinr = (direct * own).powi(2) / phi;

        let u = mmse_receiver(&channels, &v, k)?;
        let e = error_covariance(&channels, &v, k)?;
        println!(
            "user {k}: u = {:.6} (closed form {:.6}), e = {:.6} (closed form {:.6})",
            u[(0, 0)].re,
            direct * own / (phi + (direct * own).powi(2)),
            e[(0, 0)].re,
            1.0 / (1.0 + sinr),
        );
    }

    let errors = [error_covariance(&channels, &v, 0)?, error_covariance(&channels, &v, 1)?];
    let w = mse_weights(&errors, &RateWeights::equal(2))?;
    for (k, (wk, ek)) in w.iter().zip(&errors).enumerate() {
        println!("user {k}: w = {:.6} = 1/(e ln2) = {:.6}", wk[(0, 0)].re, 1.0 / (ek[(0, 0)].re * LN_2));
    }
    Ok(())
}
