pub mod arith;
pub mod curve;
pub mod elliptic;
pub mod excise;
pub mod genus0;
pub mod oracle;
pub mod poly;
pub mod relative;
pub mod upoly;
pub mod zerodim;
