//! Election playlists: every participant votes in the single-winner
//! elections (zero, then one, then three missing voters) and then in the
//! multi-winner elections of their group, in order of increasing uncertainty.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

/// Multi-winner group a participant is assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Group {
    TwoWinner,
    ThreeWinner,
}

impl Group {
    pub fn winners(self) -> usize {
        match self {
            Group::TwoWinner => 2,
            Group::ThreeWinner => 3,
        }
    }
}

impl TryFrom<u8> for Group {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(Group::TwoWinner),
            3 => Ok(Group::ThreeWinner),
            _ => Err(format!("group must be 2 or 3, got {v}")),
        }
    }
}

impl From<Group> for u8 {
    fn from(g: Group) -> u8 {
        g.winners() as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Election {
    pub scenario_id: String,
    pub k: usize,
    pub n: u32,
}

impl Election {
    fn new(scenario_id: &str, k: usize, n: u32) -> Self {
        Election { scenario_id: scenario_id.to_owned(), k, n }
    }
}

/// The elections each scenario defines, with the per-group multi-winner lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaylistConfig {
    pub single_winner: Vec<Election>,
    pub two_winner: Vec<Election>,
    pub three_winner: Vec<Election>,
}

const UNCERTAINTY: [u32; 3] = [0, 1, 3];

impl Default for PlaylistConfig {
    fn default() -> Self {
        let single_ids = ["1a-reconstructed", "1b", "2a", "3", "4"];
        let single_winner = UNCERTAINTY
            .iter()
            .flat_map(|&n| single_ids.iter().map(move |id| Election::new(id, 1, n)))
            .collect();
        let multi = |k: usize, ids: &[&str]| -> Vec<Election> {
            let mut list: Vec<Election> = UNCERTAINTY
                .iter()
                .flat_map(|&n| ids.iter().map(move |id| Election::new(id, k, n)))
                .collect();
            // Scenario 4 only runs its multi-winner elections with no missing voters.
            list.insert(ids.len(), Election::new("4", k, 0));
            list
        };
        PlaylistConfig {
            single_winner,
            two_winner: multi(2, &["1a-reconstructed", "1b", "2a", "3"]),
            three_winner: multi(3, &["1a-reconstructed", "1b", "2b", "3"]),
        }
    }
}

impl PlaylistConfig {
    pub fn playlist(&self, group: Group) -> Vec<Election> {
        let multi = match group {
            Group::TwoWinner => &self.two_winner,
            Group::ThreeWinner => &self.three_winner,
        };
        self.single_winner.iter().chain(multi).cloned().collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PlaylistConfig =
            serde_json::from_str(text).map_err(|e| ServiceError::Validation(format!("playlist: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let scenarios = approval_core::builtin_scenarios();
        for e in self.single_winner.iter().chain(&self.two_winner).chain(&self.three_winner) {
            let s = scenarios
                .iter()
                .find(|s| s.id == e.scenario_id)
                .ok_or_else(|| ServiceError::Validation(format!("unknown scenario {:?}", e.scenario_id)))?;
            if e.k == 0 || e.k > s.m() {
                return Err(ServiceError::Validation(format!("k={} out of range for scenario {}", e.k, s.id)));
            }
        }
        Ok(())
    }
}
