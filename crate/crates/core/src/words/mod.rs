//! Cutting sequences of torus leaves and their block structure.

mod cutting;
mod letter;
mod oracle;
mod rational;
mod tail;

pub use cutting::{block_prefix, cutting_sequence, theta_prefix, theta_prefix_from, Crossings, ThetaPrefix};
pub use letter::{BlockWord, Letter, Word};
pub use oracle::{
    count_all_block_words, count_factors, factor_set, inadmissible_word, is_admissible, is_block_word_admissible,
    Admissibility, InadmissibleWord, Witness,
};
pub use rational::{ratio_parts, rational_word, rational_word_any, rational_word_pq, SpEpTable};
pub use tail::{same_tail, TailReport, TailVerdict};
