pub mod cli;
pub mod continuation;
pub mod error;
pub mod ifunc;
pub mod mirror;
pub mod moduli;
pub mod pf;
pub mod powerseries;
pub mod ring;
pub mod series;
pub mod special;
pub mod statespace;
pub mod tseries;
pub mod verify;

pub use error::{Error, Result};
pub use ring::{HPoly, ModelCase, Rational};
pub use series::{FreqSeries, Side, ZLaurent};
pub use tseries::TSeries;
