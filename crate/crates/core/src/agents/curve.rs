/// Per-episode training summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub steps: usize,
    /// Sum of `|delta|` over the episode's updates.
    pub td_error: f64,
    pub reached_terminal: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LearningCurve {
    pub episodes: Vec<EpisodeRecord>,
}

impl LearningCurve {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            episodes: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, record: EpisodeRecord) {
        self.episodes.push(record);
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }
}
