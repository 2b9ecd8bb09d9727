//! Executable decision procedures for the quantitative theory of
//! cellular automata on groups: injectivity and post-surjectivity
//! certificates, their duality, inverse synthesis, image subshifts of
//! finite type, Garden of Eden search, and a group-ring module with
//! direct-finiteness scans and the metric pseudonorm on the augmentation
//! ideal.
//!
//! A cellular automaton here is a continuous shift-equivariant self-map
//! of a full shift `A^G`, given concretely by a finite memory set
//! `F ⊆ G` and a local rule `τ: A^F → A` via `T(x)(g) = τ(x ↾ g·F)`.
//! Supported groups are the integers and finite groups presented by
//! multiplication tables; both are sofic, so on the full shift
//! post-surjectivity, injectivity and reversibility coincide, and every
//! decision comes with a machine-checkable certificate or witness:
//!
//! - an *injectivity set* `N`: a window on which images of
//!   configurations differing at the identity must differ;
//! - a *post-surjectivity set* `M`: a window confining the preimage
//!   correction of a single-site image edit;
//! - explicit non-injectivity witness pairs and pre-injectivity
//!   "diamonds" as eventually periodic configurations;
//! - Garden of Eden patterns with exhaustively verified empty preimage.
//!
//! Module map:
//!
//! - [`group`]: finite groups via Cayley tables, the integers, finite
//!   subset arithmetic, canonical subset enumeration.
//! - [`symbolic`]: patterns, configurations (total maps and eventually
//!   periodic descriptions), local rules, SFT membership, and de Bruijn
//!   presentations of image shifts on the integers.
//! - [`analysis`]: the certificate searches and decision procedures.
//! - [`groupring`]: group rings over prime fields, convolution automata,
//!   direct-finiteness scans, bi-invariant norms and the pseudonorm
//!   `‖·‖_S` on the augmentation ideal, and the metric probe.
//! - [`json`]: the stable JSON encodings used by the command-line tool.

pub mod analysis;
pub mod group;
pub mod groupring;
pub mod json;
pub mod symbolic;
