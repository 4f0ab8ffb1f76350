use std::fmt;

/// High-level sub-goal picked by the options network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptionId {
    LaneFollowWait = 0,
    LaneChange = 1,
}

impl OptionId {
    pub const ALL: [OptionId; 2] = [OptionId::LaneFollowWait, OptionId::LaneChange];
    pub const COUNT: usize = 2;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<OptionId> {
        OptionId::ALL.get(i).copied()
    }

    /// Length-2 one-hot used to condition the planner network.
    pub fn one_hot(self) -> [f64; 2] {
        let mut v = [0.0; 2];
        v[self.index()] = 1.0;
        v
    }
}

impl fmt::Display for OptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptionId::LaneFollowWait => "follow",
            OptionId::LaneChange => "change",
        })
    }
}

/// Low-level waypoint choice. The meaning depends on the active option:
/// long / short / wait under `LaneFollowWait`, fast / normal / sharp under
/// `LaneChange`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerChoice {
    Choice0 = 0,
    Choice1 = 1,
    Choice2 = 2,
}

impl PlannerChoice {
    pub const ALL: [PlannerChoice; 3] = [
        PlannerChoice::Choice0,
        PlannerChoice::Choice1,
        PlannerChoice::Choice2,
    ];
    pub const COUNT: usize = 3;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<PlannerChoice> {
        PlannerChoice::ALL.get(i).copied()
    }

    pub fn label(self, option: OptionId) -> &'static str {
        match (option, self) {
            (OptionId::LaneFollowWait, PlannerChoice::Choice0) => "long",
            (OptionId::LaneFollowWait, PlannerChoice::Choice1) => "short",
            (OptionId::LaneFollowWait, PlannerChoice::Choice2) => "wait",
            (OptionId::LaneChange, PlannerChoice::Choice0) => "fast",
            (OptionId::LaneChange, PlannerChoice::Choice1) => "normal",
            (OptionId::LaneChange, PlannerChoice::Choice2) => "sharp",
        }
    }
}
