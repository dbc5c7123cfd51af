#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hqs/sim.hpp"

namespace hqs {

struct AdversaryParams {
    ProcessId requester = kNoProcess;  // split_requester
    ProcSet qc;                         // split_requester
    ProcSet targets;                    // five_deceives_four: Extend recipients
    QuorumSet claim;                    // quorums advertised by lying nodes
    int budget = 40;                    // cap on spontaneous messages per Byzantine node
};

// Known scripts:
//   silent            never sends anything
//   cooperative       answers Prob with {{self}}, acks Inclusion/AddCheck, mirrors Exchange
//   random_lies       random well-typed messages (and tob Checks) up to the budget
//   five_deceives_four  mirrors Exchange, then pushes Extend for every claimed quorum to targets
//   split_requester   runs Add phase 2 as requester, then sends Success to part of q_c and Fail to the rest
//   brb_equivocate    Byzantine senders/members send conflicting BRB values
//   flooder           keeps Junk traffic alive forever
std::unique_ptr<Adversary> make_adversary(const std::string& name, const AdversaryParams& params = {});
std::vector<std::string> adversary_names();

}  // namespace hqs
