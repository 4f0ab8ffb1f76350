use std::collections::VecDeque;

use rand::Rng;

use crate::world::{HistoryVector, Observation};
use crate::{Error, OptionId, PlannerChoice, Result};

/// One macro step: decision, summed rewards and the observations around it.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Observation,
    pub h: HistoryVector,
    pub option: OptionId,
    pub choice: PlannerChoice,
    pub r_option: f64,
    pub r_planner: f64,
    pub s_next: Observation,
    pub h_next: HistoryVector,
    pub terminal: bool,
    /// The next decision kept the same option; patched in when it is made.
    pub option_continues: bool,
    pub episode_id: u64,
    pub step_index: usize,
}

/// A contiguous run of transitions from one stored episode, oldest first.
/// Near the start of an episode the first transition is repeated to pad the
/// window to full length.
#[derive(Debug)]
pub struct Window<'a, T> {
    pub episode: usize,
    pub indices: Vec<usize>,
    pub steps: Vec<&'a T>,
}

impl<T> Window<'_, T> {
    pub fn last(&self) -> &T {
        self.steps[self.steps.len() - 1]
    }
}

/// Episodic replay memory bounded by total transition count. Whole episodes
/// are evicted oldest first; the newest episode is always kept.
#[derive(Debug, Clone)]
pub struct ReplayBuffer<T> {
    episodes: VecDeque<Vec<T>>,
    capacity: usize,
    len: usize,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        ReplayBuffer {
            episodes: VecDeque::new(),
            capacity,
            len: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total stored transitions.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn episode_count(&self) -> usize {
        self.episodes.len()
    }

    pub fn episodes(&self) -> impl Iterator<Item = &[T]> {
        self.episodes.iter().map(|e| e.as_slice())
    }

    /// Store a finished episode; empty episodes are ignored.
    pub fn push_episode(&mut self, episode: Vec<T>) {
        if episode.is_empty() {
            return;
        }
        self.len += episode.len();
        self.episodes.push_back(episode);
        while self.len > self.capacity && self.episodes.len() > 1 {
            let old = self.episodes.pop_front().expect("non-empty");
            self.len -= old.len();
        }
    }

    /// `batch` windows of length `n`: an episode uniformly, then an end
    /// position uniformly within it; the window is the `n` transitions ending
    /// there, clamped at the episode start.
    pub fn sample_sequences<R: Rng + ?Sized>(
        &self,
        batch: usize,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<Window<'_, T>>> {
        if self.episodes.is_empty() {
            return Err(Error::EmptyBuffer);
        }
        let mut out = Vec::with_capacity(batch);
        for _ in 0..batch {
            let e = rng.random_range(0..self.episodes.len());
            let ep = &self.episodes[e];
            let end = rng.random_range(0..ep.len());
            let indices: Vec<usize> = (0..n).map(|k| (end + k + 1).saturating_sub(n)).collect();
            let steps = indices.iter().map(|&i| &ep[i]).collect();
            out.push(Window {
                episode: e,
                indices,
                steps,
            });
        }
        Ok(out)
    }
}
