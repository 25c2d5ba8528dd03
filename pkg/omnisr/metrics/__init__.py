"""This package contains PSNR, SSIM and their spherically weighted variants for ERP images."""
