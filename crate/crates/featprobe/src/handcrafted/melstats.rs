//! Per-bin power statistics of dB mel-spectrograms.

use crate::dsp::MelSpectrogram;
use crate::handcrafted::stats;

/// Arithmetic mean of each mel bin across frames.
pub fn mean_power(spec: &MelSpectrogram) -> Vec<f64> {
    let v = spec.values();
    (0..v.rows()).map(|r| stats::mean(v.row(r))).collect()
}

/// Median of each mel bin across frames.
pub fn median_power(spec: &MelSpectrogram) -> Vec<f64> {
    let v = spec.values();
    (0..v.rows()).map(|r| stats::quantile(v.row(r), 0.5)).collect()
}

/// Per bin, the first frame index whose value is at or below
/// `threshold_db`; bins that never reach the threshold return the frame
/// count (later than any real frame).
pub fn time_to_db(spec: &MelSpectrogram, threshold_db: f64) -> Vec<f64> {
    let v = spec.values();
    (0..v.rows())
        .map(|r| {
            v.row(r)
                .iter()
                .position(|&x| x <= threshold_db)
                .unwrap_or(v.cols()) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::Scale;
    use crate::mat::Mat;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn db_spec(values: Mat) -> MelSpectrogram {
        MelSpectrogram::new(values, Scale::Db, 16000, 502)
    }

    #[test]
    fn constant_matrix_mean_is_the_constant() {
        let spec = db_spec(Mat::from_vec(128, 7, vec![-30.0; 128 * 7]));
        assert!(mean_power(&spec).iter().all(|&v| v == -30.0));
    }

    #[test]
    fn two_frame_mean() {
        let mut m = Mat::zeros(128, 2);
        *m.at_mut(0, 0) = 0.0;
        *m.at_mut(0, 1) = -80.0;
        let spec = db_spec(m);
        assert_relative_eq!(mean_power(&spec)[0], -40.0);
    }

    #[test]
    fn random_matrix_matches_row_mean_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..128 * 16).map(|_| rng.random_range(-80.0..0.0)).collect();
        let spec = db_spec(Mat::from_vec(128, 16, data));
        let means = mean_power(&spec);
        for r in 0..128 {
            let direct: f64 = spec.values().row(r).iter().sum::<f64>() / 16.0;
            assert_relative_eq!(means[r], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn time_to_db_when_first_frame_qualifies() {
        let spec = db_spec(Mat::from_vec(128, 5, vec![-80.0; 128 * 5]));
        assert!(time_to_db(&spec, -70.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn time_to_db_finds_ramp_crossing() {
        // Bin 3 ramps down 2 dB per frame from 0; first frame at or below
        // -70 is frame 35. Bin 7 dips exactly at frame 17.
        let frames = 64;
        let mut m = Mat::zeros(128, frames);
        for t in 0..frames {
            *m.at_mut(3, t) = -2.0 * t as f64;
            *m.at_mut(7, t) = if t >= 17 { -70.0 } else { 0.0 };
        }
        let spec = db_spec(m);
        let t70 = time_to_db(&spec, -70.0);
        // Oracle: linear scan, independent of the implementation's scan.
        let scan = |row: &[f64], thr: f64| -> usize {
            for (i, &v) in row.iter().enumerate() {
                if v <= thr {
                    return i;
                }
            }
            row.len()
        };
        assert_eq!(t70[3] as usize, scan(spec.values().row(3), -70.0));
        assert_eq!(t70[3], 35.0);
        assert_eq!(t70[7], 17.0);
    }

    #[test]
    fn time_to_db_sentinel_is_frame_count() {
        let spec = db_spec(Mat::zeros(128, 9));
        assert!(time_to_db(&spec, -70.0).iter().all(|&v| v == 9.0));
    }

    #[test]
    fn time_to_db_is_monotone_in_threshold() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let data: Vec<f64> = (0..128 * 40).map(|_| rng.random_range(-80.0..0.0)).collect();
        let spec = db_spec(Mat::from_vec(128, 40, data));
        let hi = time_to_db(&spec, -70.0);
        let lo = time_to_db(&spec, -75.0);
        let lower = time_to_db(&spec, -80.0);
        for i in 0..128 {
            assert!(lo[i] >= hi[i]);
            assert!(lower[i] >= lo[i]);
        }
    }

    #[test]
    fn median_power_of_odd_frame_count() {
        let mut m = Mat::zeros(128, 3);
        for (t, v) in [(0usize, -10.0), (1, -50.0), (2, -20.0)] {
            *m.at_mut(0, t) = v;
        }
        let spec = db_spec(m);
        assert_relative_eq!(median_power(&spec)[0], -20.0);
    }
}
