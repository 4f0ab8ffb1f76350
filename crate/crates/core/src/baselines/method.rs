use std::fmt;

use crate::agent::EncoderKind;
use crate::{Error, Result};

/// The five planners of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Flat DDQN over the six option/choice pairs, PID execution.
    DdqnPid,
    /// Hierarchical DDQN (dense history encoder) driving fixed control
    /// primitives.
    HDdqnNoPid,
    /// Hand-written rules with a slot test for lane changes, PID execution.
    SlotBasedPid,
    /// Hierarchical DDQN with a dense history encoder.
    HDdqnPid,
    /// Hierarchical DDQN with the LSTM history encoder.
    HDdqnPidLstm,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::DdqnPid,
        Method::HDdqnNoPid,
        Method::SlotBasedPid,
        Method::HDdqnPid,
        Method::HDdqnPidLstm,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            Method::DdqnPid => "ddqn-pid",
            Method::HDdqnNoPid => "hddqn",
            Method::SlotBasedPid => "slot-based-pid",
            Method::HDdqnPid => "hddqn-pid",
            Method::HDdqnPidLstm => "hddqn-pid-lstm",
        }
    }

    /// Row label in comparison tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::DdqnPid => "DDQN + PID",
            Method::HDdqnNoPid => "hDDQN",
            Method::SlotBasedPid => "Slot-based + PID",
            Method::HDdqnPid => "hDDQN + PID",
            Method::HDdqnPidLstm => "hDDQN + PID + LSTM",
        }
    }

    pub fn parse(name: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.cli_name() == name)
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn is_learned(self) -> bool {
        self != Method::SlotBasedPid
    }

    pub fn uses_pid(self) -> bool {
        self != Method::HDdqnNoPid
    }

    /// History encoder of the hierarchical variants; `None` for the flat
    /// and rule-based methods.
    pub fn encoder(self) -> Option<EncoderKind> {
        match self {
            Method::HDdqnPidLstm => Some(EncoderKind::Lstm),
            Method::HDdqnNoPid | Method::HDdqnPid => Some(EncoderKind::Dense),
            Method::DdqnPid | Method::SlotBasedPid => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// A method together with the noise setting it is run under. Only the
/// combinations that appear in the comparison table can be built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MethodSpec {
    method: Method,
    noise: bool,
}

impl MethodSpec {
    /// Rows of the comparison table, in display order.
    pub const TABLE: [MethodSpec; 8] = [
        MethodSpec {
            method: Method::DdqnPid,
            noise: false,
        },
        MethodSpec {
            method: Method::HDdqnNoPid,
            noise: false,
        },
        MethodSpec {
            method: Method::SlotBasedPid,
            noise: false,
        },
        MethodSpec {
            method: Method::SlotBasedPid,
            noise: true,
        },
        MethodSpec {
            method: Method::HDdqnPid,
            noise: false,
        },
        MethodSpec {
            method: Method::HDdqnPid,
            noise: true,
        },
        MethodSpec {
            method: Method::HDdqnPidLstm,
            noise: false,
        },
        MethodSpec {
            method: Method::HDdqnPidLstm,
            noise: true,
        },
    ];

    pub fn new(method: Method, noise: bool) -> Result<MethodSpec> {
        let spec = MethodSpec { method, noise };
        if MethodSpec::TABLE.contains(&spec) {
            Ok(spec)
        } else {
            Err(Error::Config(format!(
                "method `{method}` is not run with observation noise"
            )))
        }
    }

    pub fn method(self) -> Method {
        self.method
    }

    pub fn noise(self) -> bool {
        self.noise
    }

    pub fn label(self) -> String {
        if self.noise {
            format!("{} (noise)", self.method.label())
        } else {
            self.method.label().to_string()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.cli_name()).unwrap(), m);
        }
        assert!(matches!(Method::parse("dqn"), Err(Error::UnknownMethod(_))));
    }

    #[test]
    fn only_table_combinations_exist() {
        let mut n = 0;
        for m in Method::ALL {
            for noise in [false, true] {
                if MethodSpec::new(m, noise).is_ok() {
                    n += 1;
                }
            }
        }
        assert_eq!(n, 8);
        assert!(MethodSpec::new(Method::DdqnPid, true).is_err());
        assert!(MethodSpec::new(Method::HDdqnNoPid, true).is_err());
    }

    #[test]
    fn labels() {
        let s = MethodSpec::new(Method::SlotBasedPid, true).unwrap();
        assert_eq!(s.label(), "Slot-based + PID (noise)");
        assert_eq!(Method::HDdqnPid.encoder(), Some(EncoderKind::Dense));
        assert!(!Method::HDdqnNoPid.uses_pid());
    }
}
