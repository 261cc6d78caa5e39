use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// Wichura (1988) algorithm AS 241, PPND16: rational approximations to the
// standard normal quantile with relative error about 1e-16.
#[allow(clippy::excessive_precision)]
const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_608e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
#[allow(clippy::excessive_precision)]
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
#[allow(clippy::excessive_precision)]
const NEAR_NUM: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_9e0,
    5.769_497_221_460_691_405_5e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
#[allow(clippy::excessive_precision)]
const NEAR_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_4e0,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
#[allow(clippy::excessive_precision)]
const TAIL_NUM: [f64; 8] = [
    6.657_904_643_501_103_777_2e0,
    5.463_784_911_164_114_369_9e0,
    1.784_826_539_917_291_335_8e0,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
#[allow(clippy::excessive_precision)]
const TAIL_DEN: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn poly(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Standard normal quantile for `p` in (0, 1).
pub fn normal_quantile<T: Scalar>(p: T) -> T {
    let p = p.as_f64();
    assert!(
        p > 0.0 && p < 1.0,
        "quantile probability must lie in (0, 1)"
    );
    let q = p - 0.5;
    let z = if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        q * poly(&CENTRAL_NUM, r) / poly(&CENTRAL_DEN, r)
    } else {
        let r = if q < 0.0 { p } else { 1.0 - p };
        let r = (-r.ln()).sqrt();
        let x = if r <= 5.0 {
            let r = r - 1.6;
            poly(&NEAR_NUM, r) / poly(&NEAR_DEN, r)
        } else {
            let r = r - 5.0;
            poly(&TAIL_NUM, r) / poly(&TAIL_DEN, r)
        };
        if q < 0.0 {
            -x
        } else {
            x
        }
    };
    T::of(z)
}

/// A binomial proportion with its confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialEstimate<T> {
    pub successes: u64,
    pub trials: u64,
    pub confidence: T,
    /// `successes / trials`.
    pub point: T,
    /// The interval's centre, `(successes + z²/2) / (trials + z²)`.
    pub adjusted: T,
    pub lower: T,
    pub upper: T,
}

/// Agresti–Coull interval, clipped to [0, 1].
pub fn agresti_coull_interval<T: Scalar>(
    successes: u64,
    trials: u64,
    confidence: T,
) -> Result<BinomialEstimate<T>> {
    if trials == 0 {
        return Err(Error::InvalidInput(
            "binomial interval needs at least one trial".into(),
        ));
    }
    if successes > trials {
        return Err(Error::InvalidInput(format!(
            "successes ({successes}) exceed trials ({trials})"
        )));
    }
    if !(confidence > T::zero() && confidence < T::one()) {
        return Err(Error::InvalidInput("confidence must lie in (0, 1)".into()));
    }
    let two = T::of(2.0);
    let z = normal_quantile((T::one() + confidence) / two);
    let z2 = z * z;
    let n = T::of(trials as f64);
    let x = T::of(successes as f64);
    let n_adj = n + z2;
    let p_adj = (x + z2 / two) / n_adj;
    let half = z * (p_adj * (T::one() - p_adj) / n_adj).sqrt();
    Ok(BinomialEstimate {
        successes,
        trials,
        confidence,
        point: x / n,
        adjusted: p_adj,
        lower: (p_adj - half).max(T::zero()),
        upper: (p_adj + half).min(T::one()),
    })
}
