//! Training-side numerics: losses with analytic gradients, learning-rate
//! schedules, the class-ratio sampler, intensity augmentation and the
//! detector resize rule.

mod augment;
mod loss;
mod resize;
mod sampler;
mod schedule;

pub use augment::{augment_intensity, AugmentationRanges, IntensityParams};
pub use loss::{
    bce_loss, combined_loss, dice_loss, focal_loss, CombinedLossConfig, LossValueGrad, PredTarget, PRED_EPS,
};
pub use resize::{retina_resize, RETINA_MAX_SIDE, RETINA_MIN_SIDE};
pub use sampler::ratio_sampler;
pub use schedule::{
    cosine_annealing_lr, plateau_step, LrSchedule, PlateauConfig, PlateauMode, SchedulerState, TrainingScheme,
    SEGMENTATION_SCHEMES,
};
