use crate::space::Combination;

/// Observed combinations and targets in query order, with the running best.
#[derive(Debug, Clone, Default)]
pub struct ObservationHistory {
    combinations: Vec<Combination>,
    targets: Vec<f64>,
    best: Option<usize>,
}

impl ObservationHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Combination, y: f64) {
        let idx = self.targets.len();
        // strict: the earliest attaining combination stays best
        if self.best.is_none_or(|b| y < self.targets[b]) {
            self.best = Some(idx);
        }
        self.combinations.push(c);
        self.targets.push(y);
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn combinations(&self) -> &[Combination] {
        &self.combinations
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn best(&self) -> Option<(&Combination, f64)> {
        self.best.map(|i| (&self.combinations[i], self.targets[i]))
    }

    pub fn best_index(&self) -> Option<usize> {
        self.best
    }
}
