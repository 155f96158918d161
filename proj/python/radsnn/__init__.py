"""Spiking-network training engine with trainable rectified axonal delays."""

from radsnn._core import (
    Checkpoint,
    CumulativeTrace,
    Dataset,
    DelayState,
    EpochRow,
    Evaluation,
    EventStream,
    Grid,
    Network,
    NetworkSpec,
    Optimizer,
    OptimizerConfig,
    RunConfig,
    SpikeRaster,
    SurrogateConfig,
    SynthParams,
    TargetSpec,
    TrainConfig,
    TrainReport,
    apply_profile,
    build_network,
    clamp_delay,
    cmd_ablate,
    cmd_analyze,
    cmd_eval,
    cmd_gradcheck,
    cmd_synth,
    cmd_train,
    cumulative_trace,
    default_config,
    delay_gradient,
    effective_config_json,
    eval_refractory,
    eval_response,
    evaluate,
    grad_check,
    kernel_table,
    load_checkpoint,
    load_events,
    parse_config_text,
    rasterize,
    run_training,
    save_checkpoint,
    shift_spikes,
    smoothed_loss,
    synth_dataset,
    unshift_gradient,
    write_events,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
