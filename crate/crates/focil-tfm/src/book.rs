//! Doc-tested copies of the guide chapters in `book/`, one module per
//! chapter so a failing snippet names its origin. Compiled only while
//! rustdoc collects doc-tests, which is what keeps the book's code blocks
//! from drifting away from the API.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/money.md")]
mod money {}

#[doc = include_str!("../../../book/src/bids-and-fees.md")]
mod bids_and_fees {}

#[doc = include_str!("../../../book/src/lists-and-blocks.md")]
mod lists_and_blocks {}

#[doc = include_str!("../../../book/src/payments.md")]
mod payments {}

#[doc = include_str!("../../../book/src/bribes.md")]
mod bribes {}

#[doc = include_str!("../../../book/src/property-checks.md")]
mod property_checks {}

#[doc = include_str!("../../../book/src/plant-free.md")]
mod plant_free {}

#[doc = include_str!("../../../book/src/scenarios.md")]
mod scenarios {}
