#ifndef SCJ2_SYNC_PROTOCOL_HPP_
#define SCJ2_SYNC_PROTOCOL_HPP_

#include "scj2/kernel/event.hpp"

namespace scj2::sync {

/// Channel symbols of the monitor protocol. Field order is (object, thread)
/// for every lock channel.
struct SyncChannels {
  Sym start_sync_meth;
  Sym lock_acquired;
  Sym end_sync_meth;
  Sym wait_call;
  Sym wait_ret;
  Sym notify;
  Sym notify_all;
  Sym interrupt;  // (thread)
  Sym throw_;     // (exception kind), interleaved
  Sym end_of_program;
};

const SyncChannels& sync_channels();

/// Identifier domain of the five exception kinds.
Domain exception_domain();

/// Declares the monitor channels, `throw` and `end_of_program`.
void declare_sync_channels(kernel::ChannelTable& table, const Domain& objects,
                           const Domain& threads);

}  // namespace scj2::sync

#endif  // SCJ2_SYNC_PROTOCOL_HPP_
