use super::CognitiveParams;

/// One temporal-difference step:
/// `q + learning_rate * (reward + discount * next_max_q - q)`.
pub fn q_update(q: f64, reward: f64, next_max_q: f64, params: &CognitiveParams) -> f64 {
    q + params.learning_rate * (reward + params.discount * next_max_q - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_steps() {
        let p = CognitiveParams::default();
        assert!((q_update(0.0, 1.0, 0.0, &p) - 0.1).abs() < 1e-12);
        assert!((q_update(0.0, -1.0, 0.0, &p) + 0.1).abs() < 1e-12);
    }

    #[test]
    fn bootstrapped_target_uses_discount() {
        let p = CognitiveParams::default();
        // 0.5 + 0.1 * (-0.05 + 0.7 * 1.0 - 0.5)
        assert!((q_update(0.5, -0.05, 1.0, &p) - 0.515).abs() < 1e-12);
    }
}
