pub mod compare;
pub mod extract;
pub mod rank;
pub mod score;
pub mod topn;
pub mod validate;

mod profiles;
