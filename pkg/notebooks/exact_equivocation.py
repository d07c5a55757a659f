# %% [markdown]
# # What the wiretapper learns at N = 6
#
# With three blocks of six symbols the wiretapper's posterior over every
# message can be computed exactly.  It knows every codebook along with the
# key coloring, and sums over all hidden legitimate outputs.
#
# Run with `python3 notebooks/exact_equivocation.py`.

# %%
from wtfb.channel import BinaryWiretapParams, make_binary_channel
from wtfb.sim import SimConfig, corner_rates, default_aux, run_wiretap_feedback_sim

ch = make_binary_channel(BinaryWiretapParams(0.1, 0.3))
rates = corner_rates(ch, default_aux(2, 2)).scaled_messages(0.9)
print("index bits per block:", rates.bits(6))

# %%
rep = run_wiretap_feedback_sim(ch, SimConfig(n=3, N=6, rates=rates, trials=20))
bits = rates.bits(6)
secrecy = (2 * bits["r1"] + bits["r2"]) / 18
print(f"method: {rep.equivocation_method}")
print(f"message entropy per symbol      {secrecy:.4f}")
print(f"posterior entropy per symbol    {rep.measured_equivocation_rate:.4f}")
print(f"asymptotic plug-in bound        {rep.equivocation_bound:.4f}")

# %% [markdown]
# The posterior keeps most of the message entropy.  The asymptotic bound is
# not meaningful at this size: its key term does not depend on how many key
# bits were actually sent.
