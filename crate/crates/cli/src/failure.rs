use lowdens_core::Error;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Input,
    Numerical,
    Alarm,
}

impl Kind {
    pub fn code(self) -> u8 {
        match self {
            Kind::Usage => 1,
            Kind::Input => 2,
            Kind::Numerical => 3,
            Kind::Alarm => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Usage => "usage",
            Kind::Input => "input",
            Kind::Numerical => "numerical",
            Kind::Alarm => "alarm",
        }
    }
}

#[derive(Debug, Error)]
#[error("{msg}")]
pub struct Failure {
    pub kind: Kind,
    pub msg: String,
}

impl Failure {
    pub fn new(kind: Kind, msg: impl Into<String>) -> Self {
        Self { kind, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Config(_) => Kind::Usage,
            Error::Numerical { .. } => Kind::Numerical,
            Error::Contract(_) | Error::Parse { .. } | Error::EmptyClass(_) | Error::MissingInput(_) | Error::Io { .. } => {
                Kind::Input
            }
        };
        Failure::new(kind, e.to_string())
    }
}
