"""Multimodal stylized motion generation in a learned motion latent space.

A frozen content-conditioned latent diffusion model is steered toward a target
style by a trainable style network coupled to the content network through
zero-initialized bidirectional fusion links, with classifier-free and
classifier-based guidance at sampling time. Style signals may be reference
motions or text/image embeddings aligned contrastively into the style space.
"""

__version__ = "0.1.0"
