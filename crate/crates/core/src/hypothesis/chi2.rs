use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper tail `P(chi2_df > x)`.
pub fn chi2_sf(x: f64, df: u32) -> f64 {
    assert!(df >= 1, "chi-square needs df >= 1");
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("df >= 1").sf(x)
}
