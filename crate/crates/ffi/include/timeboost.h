#ifndef TIMEBOOST_H
#define TIMEBOOST_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_ARGUMENT = 2,
  TB_STATUS_INVALID_UTF8 = 3,
  TB_STATUS_DUPLICATE_ID = 4,
  TB_STATUS_TIME_REGRESSION = 5,
  /**
   * The output buffer is too small; `needed` holds the required size.
   */
  TB_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * Nothing left to read.
   */
  TB_STATUS_EMPTY = 7,
  TB_STATUS_INVALID_CONFIG = 8,
  TB_STATUS_PANIC = 9,
} TbStatus;

/**
 * Centralized sequencer queue.
 */
typedef struct TbQueue TbQueue;

/**
 * Result of one committee scenario.
 */
typedef struct TbSim TbSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf`.
 */
enum TbStatus tb_last_error(char *buf, size_t len, size_t *needed);

/**
 * Time boost `g*bid/(bid+c)`.
 */
enum TbStatus tb_time_boost(double bid, double g, double c, double *out);

/**
 * Score and release time of a transaction arriving at `t_secs` with `bid`.
 */
enum TbStatus tb_score(double t_secs,
                       double bid,
                       double g,
                       double c,
                       double *out_score,
                       double *out_release);

/**
 * Expected equilibrium bid and latency spend per player for `n` uniform bidders.
 */
enum TbStatus tb_bidding_share(double g, uint32_t n, double *out_bid, double *out_latency);

/**
 * Creates an empty queue. Release with [`tb_queue_free`].
 */
enum TbStatus tb_queue_new(double g, double c, struct TbQueue **out);

/**
 * Releases a queue. Null is ignored.
 */
void tb_queue_free(struct TbQueue *q);

/**
 * Adds a transaction.
 */
enum TbStatus tb_queue_push(struct TbQueue *q, const char *id, double t_secs, double bid);

/**
 * Number of transactions still pending.
 */
enum TbStatus tb_queue_len(const struct TbQueue *q, size_t *out);

/**
 * Moves every transaction whose release time has passed at `now` to the
 * emitted list, in feed order, and reports how many were released.
 */
enum TbStatus tb_queue_emit(struct TbQueue *q, double now, size_t *out_count);

/**
 * Pops the next emitted transaction, copying its id into `buf`. Returns
 * [`TbStatus::Empty`] when nothing is left. On
 * [`TbStatus::BufferTooSmall`] the entry stays in place.
 */
enum TbStatus tb_queue_next(struct TbQueue *q,
                            char *buf,
                            size_t len,
                            size_t *needed,
                            double *out_score);

/**
 * Runs the scenario described by `config_json`. Release with [`tb_sim_free`].
 */
enum TbStatus tb_sim_run(const char *config_json, struct TbSim **out);

/**
 * Releases a scenario result. Null is ignored.
 */
void tb_sim_free(struct TbSim *sim);

/**
 * Sets `out` to 1 when every run invariant held, else 0.
 */
enum TbStatus tb_sim_ok(const struct TbSim *sim, int32_t *out);

/**
 * Copies the run metrics as a JSON object into `buf`.
 */
enum TbStatus tb_sim_metrics_json(const struct TbSim *sim, char *buf, size_t len, size_t *needed);

/**
 * Copies the event log as JSON lines into `buf`.
 */
enum TbStatus tb_sim_event_log(const struct TbSim *sim, char *buf, size_t len, size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TIMEBOOST_H */
